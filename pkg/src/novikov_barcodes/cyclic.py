"""Cyclic group actions on filtered complexes and p-tuple singular value decompositions.

Everything here is exact when the exponent group is trivial: a strictly
filtration-lowering operator on finitely many filtration levels is nilpotent,
so every series below terminates.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .barcode import INF, Bar, Barcode
from .coefficients import (
    CyclotomicRational,
    DomainError,
    PreconditionError,
    format_rational,
    parse_rational,
)
from .complexes import (
    ConeComplex,
    FilteredChainComplex,
    build_cone,
    double_map,
    homotopy_term as _homotopy_term,
    is_chain_map,
    random_complex,
)
from .filtered_linalg import (
    FilteredMap,
    FilteredSpace,
    SVDResult,
    check_svd,
    combine,
    complete_orthogonal,
    coordinates,
    filtration_of,
    is_orthogonal,
    restrict_map,
    span_basis,
    svd,
    vec_equal,
)

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# Series on nilpotent perturbations
# ---------------------------------------------------------------------------


def _identity_like(A: FilteredMap) -> FilteredMap:
    return FilteredMap.identity(A.domain)


def _is_strictly_lowering(Q: FilteredMap) -> bool:
    return Q.is_zero() or Q.shift_bound() < 0


def _nilpotent_series(Q: FilteredMap, coeff, order=None) -> FilteredMap:
    """``sum_n coeff(n) Q^n``, stopping once ``Q^n`` vanishes (or is beyond ``order``)."""
    if not _is_strictly_lowering(Q):
        raise PreconditionError("the perturbation does not strictly lower filtration")
    exact = Q.domain.gamma.is_trivial
    if not exact and order is None:
        raise PreconditionError("a truncation order is needed for a nontrivial exponent group")
    total = _identity_like(Q).scale(coeff(0))
    power = _identity_like(Q)
    bound = Q.domain.dim + 2 if exact else None
    n = 0
    while True:
        n += 1
        power = power @ Q
        if order is not None:
            power = power.truncate(order)
        if power.is_zero():
            return total
        if bound is not None and n > bound:
            raise DomainError("series failed to terminate within the nilpotency bound")
        c = coeff(n)
        if c:
            total = total + power.scale(c)
        if order is not None and not exact and n > 10 * Q.domain.dim + 50:
            raise DomainError("truncated series did not settle")


def _binom(alpha: Fraction, n: int) -> Fraction:
    out = Fraction(1)
    for i in range(n):
        out = out * (alpha - i) / (i + 1)
    return out


def invert_perturbed(A: FilteredMap, n: int = 1, order=None) -> FilteredMap:
    """Inverse of ``A`` when ``A^n = I - Q`` with ``Q`` strictly lowering: ``A^{n-1} sum_j Q^j``."""
    I = _identity_like(A)
    Q = I - A**n
    series = _nilpotent_series(Q, lambda j: 1, order)
    inv = (A ** (n - 1)) @ series
    if order is not None:
        inv = inv.truncate(order)
    return inv


def root_of_unipotent(X: FilteredMap, p: int, order=None) -> FilteredMap:
    """``(I + X)^{1/p}`` by the binomial series, for strictly lowering ``X``."""
    alpha = Fraction(1, p)
    return _nilpotent_series(X, lambda n: _binom(alpha, n), order)


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------


def _graded_power(F: dict, n: int) -> dict:
    return {k: F[k] ** n for k in F}


def _graded_compose(F: dict, G: dict) -> dict:
    return {k: F[k] @ G[k] for k in F}


def _graded_equal(F: dict, G: dict) -> bool:
    return all(F[k].equals(G[k]) for k in F)


@dataclass
class CyclicActionData:
    """A complex with a free ``Z_{p^2}`` rotation perturbed into ``S``, and ``T = S^p``."""

    p: int
    seed: int
    size: int
    hbar: Fraction
    complex: FilteredChainComplex
    root_rotation: dict  # R_{p^2}
    homotopy: dict  # M_k: C_k -> C_{k+1}
    S: dict
    T: dict
    xi_power: int = 1
    _cone: ConeComplex | None = field(default=None, repr=False)

    @property
    def rotation(self) -> dict:
        """``R_p = R_{p^2}^p``."""
        return _graded_power(self.root_rotation, self.p)

    @property
    def cone(self) -> ConeComplex:
        if self._cone is None:
            self._cone = build_cone(self.complex, self.T, CyclotomicRational.xi(self.p, self.xi_power))
        return self._cone

    def perturbation(self) -> dict:
        """``N`` with ``T = R_p (I + N)``."""
        R = self.rotation
        out = {}
        for k in self.complex.degrees:
            Rinv = R[k] ** (self.p - 1)
            out[k] = Rinv @ self.T[k] - FilteredMap.identity(self.complex.space(k))
        return out

    def check(self) -> list:
        """Invariant violations (empty when the data is a valid cyclic action)."""
        C = self.complex
        problems = []
        R = self.rotation
        for k in C.degrees:
            ident = FilteredMap.identity(C.space(k))
            if not (R[k] ** self.p).equals(ident):
                problems.append(f"R^p != I in degree {k}")
            if R[k].shift_bound() > 0 or any(len(c) != 1 for c in R[k].columns):
                problems.append(f"R is not a filtration-preserving permutation in degree {k}")
            if not (self.S[k] ** self.p).equals(self.T[k]):
                problems.append(f"S^p != T in degree {k}")
        for k, N in self.perturbation().items():
            if not N.is_zero() and N.shift_bound() > -self.hbar:
                problems.append(f"N does not lower filtration by hbar in degree {k}")
        if not is_chain_map(C, self.T):
            problems.append("[T, d] != 0")
        if not is_chain_map(C, self.S):
            problems.append("[S, d] != 0")
        for k in C.degrees:
            R2 = self.root_rotation[k]
            fixed = [j for j, col in enumerate((R2**self.p).columns) if j in col]
            if fixed and C.space(k).dim:
                problems.append(f"rotation is not free in degree {k}")
            del R2
        return problems

    def to_json(self) -> dict:
        def graded(F):
            return {str(k): F[k].to_json() for k in sorted(F)}

        return {
            "schema_version": SCHEMA_VERSION,
            "p": self.p,
            "seed": self.seed,
            "size": self.size,
            "hbar": format_rational(self.hbar),
            "xi_power": self.xi_power,
            "complex": self.complex.to_json(),
            "root_rotation": graded(self.root_rotation),
            "homotopy": graded(self.homotopy),
            "S": graded(self.S),
            "T": graded(self.T),
        }

    @classmethod
    def from_json(cls, data) -> "CyclicActionData":
        C = FilteredChainComplex.from_json(data["complex"])

        def graded(key, shift=0):
            out = {}
            for k, m in data[key].items():
                k = int(k)
                out[k] = FilteredMap.from_json(m).with_spaces(C.space(k), C.space(k + shift))
            return out

        return cls(
            int(data["p"]),
            int(data["seed"]),
            int(data["size"]),
            parse_rational(data["hbar"]),
            C,
            graded("root_rotation"),
            graded("homotopy", 1),
            graded("S"),
            graded("T"),
            int(data.get("xi_power", 1)),
        )


def regular_extension(B: FilteredChainComplex, n: int) -> tuple:
    """``B (x) K[Z_n]`` with generators ``(b, g)`` and the shift ``(b, g) -> (b, g+1)``."""
    spaces, boundaries, rotation = {}, {}, {}
    for k in B.degrees:
        sp = B.space(k)
        labels = [f"{lab}@{g}" for lab in sp.labels for g in range(n)]
        filts = [f for f in sp.filtrations for _ in range(n)]
        spaces[k] = FilteredSpace(labels, filts, B.gamma, B.prime)
    for k in B.degrees:
        d = B.boundary(k)
        cols = []
        for j in range(B.space(k).dim):
            for g in range(n):
                cols.append({i * n + g: s for i, s in d.columns[j].items()})
        cod = spaces.get(k - 1, FilteredSpace.empty(B.prime, B.gamma))
        boundaries[k] = FilteredMap(spaces[k], cod, cols)
        one = spaces[k].one()
        rotation[k] = FilteredMap(
            spaces[k], spaces[k], [{j * n + (g + 1) % n: one} for j in range(B.space(k).dim) for g in range(n)]
        )
    C = FilteredChainComplex(spaces, boundaries, B.strictness, B.prime, B.gamma)
    return C, rotation


def _random_lowering_homotopy(C: FilteredChainComplex, rng: random.Random, hbar: Fraction, density: float) -> dict:
    M = {}
    for k in C.degrees:
        dom, cod = C.space(k), C.space(k + 1)
        cols = [{} for _ in range(dom.dim)]
        for j in range(dom.dim):
            for i in range(cod.dim):
                if cod.filtrations[i] <= dom.filtrations[j] - hbar and rng.random() < density:
                    c = CyclotomicRational.rational(C.prime, rng.choice([1, -1, 2, Fraction(1, 2), 3]))
                    if C.prime > 2 and rng.random() < 0.3:
                        c = c * CyclotomicRational.xi(C.prime, rng.randrange(1, C.prime))
                    cols[j][i] = dom.scalar(c)
        M[k] = FilteredMap(dom, cod, cols)
    return M


def generate_power_p_fixture(
    p: int,
    size: int = 2,
    seed: int = 0,
    hbar=Fraction(1, 2),
    density: float = 0.3,
    perturb: bool = True,
    xi_power: int = 1,
) -> CyclicActionData:
    """Seeded ``Power_p``-style instance: ``S = R_{p^2}(I + dM + Md)`` and ``T = S^p``.

    ``size`` bounds the number of elementary pairs per degree of the base
    complex.  Draws that come out empty are regenerated.
    """
    hbar = parse_rational(hbar)
    rng = random.Random(seed)
    for _ in range(200):
        B = random_complex(
            rng, prime=p, degrees=(0, 2), max_pairs=size, acyclic=True, strictness=hbar, mixing=2, spread=6
        )
        if not B.total_dim():
            continue
        C, R2 = regular_extension(B, p * p)
        if not perturb:
            M = {k: FilteredMap.zero(C.space(k), C.space(k + 1)) for k in C.degrees}
            break
        M = _random_lowering_homotopy(C, rng, hbar, density)
        if any(not _homotopy_term(C, M, k).is_zero() for k in C.degrees):
            break
    else:
        raise DomainError("could not draw a usable base complex")
    S = {k: R2[k] @ (FilteredMap.identity(C.space(k)) + _homotopy_term(C, M, k)) for k in C.degrees}
    T = _graded_power(S, p)
    return CyclicActionData(p, seed, size, hbar, C, R2, M, S, T, xi_power)


# ---------------------------------------------------------------------------
# Repair to exact group actions
# ---------------------------------------------------------------------------


@dataclass
class RepairResult:
    T: dict
    S: dict | None


def repair_to_group_action(data: CyclicActionData, order=None) -> RepairResult:
    """``T' = T (I + T^{-p} P_T)^{1/p}`` with ``P_T = I - T^p``, then ``S' = S (I + T^{-1}(T' - T))^{1/p}``."""
    p = data.p
    C = data.complex
    Tn, Sn = {}, {}
    for k in C.degrees:
        T = data.T[k]
        I = FilteredMap.identity(C.space(k))
        Tp = T**p
        P_T = I - Tp
        Tp_inv = invert_perturbed(Tp, 1, order)
        T_new = T @ root_of_unipotent(Tp_inv @ P_T, p, order)
        Tn[k] = T_new
        if data.S is not None:
            T_inv = invert_perturbed(T, p, order)
            P3 = T_new - T
            Sn[k] = data.S[k] @ root_of_unipotent(T_inv @ P3, p, order)
    result = RepairResult(Tn, Sn if data.S is not None else None)
    problems = check_repair(data, result)
    if problems and order is None:
        raise DomainError(f"repair failed: {problems[:3]}")
    return result


def check_repair(data: CyclicActionData, result: RepairResult) -> list:
    C = data.complex
    problems = []
    for k in C.degrees:
        I = FilteredMap.identity(C.space(k))
        Tn = result.T[k]
        if not (Tn**data.p).equals(I):
            problems.append(f"(T')^p != I in degree {k}")
        diff = Tn - data.T[k]
        if not _is_strictly_lowering(diff):
            problems.append(f"T' - T does not strictly lower filtration in degree {k}")
        if not (Tn @ data.T[k]).equals(data.T[k] @ Tn):
            problems.append(f"[T', T] != 0 in degree {k}")
        if result.S is not None and not (result.S[k] ** data.p).equals(Tn):
            problems.append(f"(S')^p != T' in degree {k}")
    if not is_chain_map(C, result.T):
        problems.append("[T', d] != 0")
    if result.S is not None and not is_chain_map(C, result.S):
        problems.append("[S', d] != 0")
    return problems


# ---------------------------------------------------------------------------
# Eigenspaces and invariant complements
# ---------------------------------------------------------------------------


def eigenprojectors(action: FilteredMap, p: int) -> list:
    """``pi_i = (1/p) sum_j xi^{-ij} A^j`` for an exact order-``p`` action ``A``."""
    space = action.domain
    I = FilteredMap.identity(space)
    if not (action**p).equals(I):
        raise PreconditionError("the action does not have exact order p")
    powers = [I]
    for _ in range(1, p):
        powers.append(powers[-1] @ action)
    out = []
    for i in range(p):
        total = FilteredMap.zero(space, space)
        for j in range(p):
            c = CyclotomicRational.xi(p, (-i * j) % p) * Fraction(1, p)
            total = total + powers[j].scale(space.scalar(c))
        out.append(total)
    return out


def eigenspace_decomposition(space: FilteredSpace, action: FilteredMap, p: int) -> list:
    """Orthogonal bases of the ``xi_p^i``-eigenspaces, ``i = 0..p-1``."""
    action = action.with_spaces(space, space)
    return [span_basis(space, pi.columns) for pi in eigenprojectors(action, p)]


def _order(action: FilteredMap, limit: int = 4096) -> int:
    I = FilteredMap.identity(action.domain)
    power = action
    for n in range(1, limit + 1):
        if power.equals(I):
            return n
        power = power @ action
    raise PreconditionError("the action has no finite order within the search limit")


def _orbit(action: FilteredMap, v: dict, n: int) -> list:
    out = [v]
    for _ in range(n - 1):
        out.append(action.apply(out[-1]))
    return out


def maschke_complement(
    space: FilteredSpace,
    action: FilteredMap,
    invariant: Sequence,
    ambient: Sequence | None = None,
    order: int | None = None,
    inverse: FilteredMap | None = None,
) -> list:
    """Orthogonal basis of an ``action``-invariant complement of ``span(invariant)`` inside ``span(ambient)``.

    Start from any orthogonal complement ``W0``, let ``pi`` project onto the
    invariant part along ``W0`` and average ``g pi g^{-1}`` over the group.
    The averaged projection ``rho`` fixes the invariant part, so
    ``{w - rho(w) : w in W0}`` spans its kernel.  ``order`` may be any ``n``
    with ``action^n`` scalar on ``span(ambient)``; conjugation by a scalar is
    trivial, so averaging over ``n`` powers is enough.
    """
    action = action.with_spaces(space, space)
    invariant = [dict(u) for u in invariant if u]
    ambient = [space.unit(i) for i in range(space.dim)] if ambient is None else [dict(v) for v in ambient]
    n = order if order is not None else _order(action)
    if invariant:
        coordinates(invariant, [action.apply(u) for u in invariant])  # raises if not invariant
    chosen = complete_orthogonal(space, invariant, ambient)
    W0 = [ambient[i] for i in chosen]
    if not W0:
        return []
    if not invariant:
        return span_basis(space, W0)
    basis = invariant + W0
    m = len(invariant)
    inv_action = inverse.with_spaces(space, space) if inverse is not None else action ** (n - 1)
    # pull back every w by g^{-j}, project in one solve, then push forward by g^j
    pulled = []
    for w in W0:
        v = w
        for _ in range(n):
            pulled.append(v)
            v = inv_action.apply(v)
    all_coeffs = coordinates(basis, pulled)
    out = []
    for a, w in enumerate(W0):
        # Horner: rho = sum_j g^j pi(g^{-j} w)
        rho: dict = {}
        for j in range(n - 1, -1, -1):
            coeffs = all_coeffs[a * n + j]
            proj = combine(basis, {i: c for i, c in coeffs.items() if i < m})
            rho = _add(action.apply(rho), proj) if rho else proj
        rho = {i: c * Fraction(1, n) for i, c in rho.items()}
        out.append(_sub(w, rho))
    return span_basis(space, out)


def _add(x: dict, y: dict) -> dict:
    out = dict(x)
    for i, c in y.items():
        s = out[i] + c if i in out else c
        if s:
            out[i] = s
        else:
            out.pop(i, None)
    return out


def _sub(x: dict, y: dict) -> dict:
    return _add(x, {i: -c for i, c in y.items()})


# ---------------------------------------------------------------------------
# p-tuple singular value decomposition
# ---------------------------------------------------------------------------


@dataclass
class Block:
    sector: int
    kind: str  # "image" or "kernel"
    domain: list  # indices into the assembled domain basis
    codomain: list  # indices into the assembled codomain basis (image blocks only)
    shift: object  # Fraction, or None for kernel blocks

    @property
    def size(self) -> int:
        return len(self.domain)

    @property
    def zero_length(self) -> bool:
        return self.kind == "image" and self.shift == 0

    def to_json(self) -> dict:
        return {
            "sector": self.sector,
            "kind": self.kind,
            "domain": self.domain,
            "codomain": self.codomain,
            "shift": None if self.shift is None else format_rational(self.shift),
            "zero_length": self.zero_length,
        }


@dataclass
class PTupleSVD:
    p: int
    degree: int  # codomain degree k of d_{k+1}
    svd: SVDResult
    blocks: list
    problems: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def bars(self) -> list:
        cod = self.svd.codomain
        return [
            Bar(self.degree, filtration_of(cod, x), s)
            for x, s in zip(self.svd.image_basis, self.svd.shifts)
        ]

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "p": self.p,
            "degree": self.degree,
            "svd": self.svd.to_json(),
            "blocks": [b.to_json() for b in self.blocks],
            "problems": list(self.problems),
        }


def _cyclic_blocks_in(space, S: FilteredMap, basis: list, p: int, order: int, S_inv: FilteredMap | None = None) -> list:
    """Split ``span(basis)`` (S-invariant, nonzero sector) into orthogonal S-cyclic ``p``-blocks."""
    blocks: list = []
    span: list = []
    remaining = list(basis)
    while len(span) < len(basis):
        comp = maschke_complement(space, S, span, remaining, order, S_inv) if span else remaining
        x = comp[0]
        block = _orbit(S, x, p)
        if not is_orthogonal(space, span + block):
            raise DomainError("cyclic span is not orthogonal to the blocks found so far")
        blocks.append(block)
        span = span + block
        remaining = comp
    return blocks


def _sector_svd(A: FilteredMap, dom_basis: list, cod_basis: list) -> tuple:
    """Plain SVD of ``A`` restricted to a pair of invariant subspaces, in ambient coordinates."""
    if not dom_basis:
        return [], [], [], []
    R = restrict_map(A, dom_basis, cod_basis)
    res = svd(R, complete_codomain=False)
    ys = [combine(dom_basis, y) for y in res.domain_basis]
    xs = [combine(cod_basis, x) for x in res.image_basis]
    return ys[: res.rank], xs, list(res.shifts), ys[res.rank :]


def p_cyclic_svd(
    cone: ConeComplex, k: int, T_exact: dict, S_exact: dict, p: int
) -> PTupleSVD:
    """SVD of ``d_{k+1}`` on the cone whose bases come in ``S'``-cyclic ``p``-blocks.

    ``T_exact`` and ``S_exact`` are the repaired actions on the source complex.
    The codomain basis spans the image of ``d_{k+1}``.
    """
    if S_exact is None:
        raise PreconditionError("p_cyclic_svd needs the repaired root action S'")
    DT = double_map(cone, T_exact)
    DS = double_map(cone, S_exact)
    A = cone.boundary(k + 1)
    dom, cod = cone.space(k + 1), cone.space(k)
    order = p * p
    dom_sectors = eigenspace_decomposition(dom, DT[k + 1], p) if dom.dim else [[] for _ in range(p)]
    cod_sectors = eigenspace_decomposition(cod, DT[k], p) if cod.dim else [[] for _ in range(p)]
    Sd = DS.get(k + 1)
    Sc = DS.get(k)
    Sd_inv = Sd ** (order - 1) if Sd is not None else None
    Sc_inv = Sc ** (order - 1) if Sc is not None else None
    pieces = []  # (sector, kind, ys, xs, shift)
    for i in range(p):
        Vi, Wi = dom_sectors[i], cod_sectors[i]
        if not Vi:
            continue
        if i == 0:
            ys, xs, shifts, ker = _sector_svd(A, Vi, Wi)
            for y, x, s in zip(ys, xs, shifts):
                pieces.append((0, "image", [y], [x], s))
            for z in ker:
                pieces.append((0, "kernel", [z], [], None))
            continue
        _, _, _, ker = _sector_svd(A, Vi, Wi)
        # S'^p = T' is the scalar xi^i on this sector
        ker_blocks = _cyclic_blocks_in(dom, Sd, ker, p, p, Sd_inv) if ker else []
        for blk in ker_blocks:
            pieces.append((i, "kernel", blk, [], None))
        F = maschke_complement(dom, Sd, ker, Vi, p, Sd_inv) if ker else list(Vi)
        W = list(Wi)
        while F:
            best = None
            for j, f in enumerate(F):
                s = filtration_of(dom, f) - filtration_of(cod, A.apply(f))
                if best is None or s < best[0]:
                    best = (s, j)
            shift, j0 = best
            Y = _orbit(Sd, F[j0], p)
            X = [A.apply(y) for y in Y]
            pieces.append((i, "image", Y, X, shift))
            W2 = maschke_complement(cod, Sc, X, W, p, Sc_inv)
            basis = X + W2
            rest = []
            all_coeffs = coordinates(basis, [A.apply(f) for f in F])
            for f, coeffs in zip(F, all_coeffs):
                corr = combine(Y, {m: c for m, c in coeffs.items() if m < p})
                v = _sub(f, corr)
                if v:
                    rest.append(v)
            F = span_basis(dom, rest)
            W = W2
    # assemble: image blocks sorted by shift (non-increasing), then kernel blocks
    image = sorted([pc for pc in pieces if pc[1] == "image"], key=lambda pc: -pc[4])
    kernel = [pc for pc in pieces if pc[1] == "kernel"]
    dom_basis, cod_basis, shifts, blocks = [], [], [], []
    for sector, kind, ys, xs, s in image:
        d0, c0 = len(dom_basis), len(cod_basis)
        dom_basis.extend(ys)
        cod_basis.extend(xs)
        shifts.extend([s] * len(ys))
        blocks.append(Block(sector, kind, list(range(d0, d0 + len(ys))), list(range(c0, c0 + len(xs))), s))
    rank = len(cod_basis)
    for sector, kind, ys, _, _ in kernel:
        d0 = len(dom_basis)
        dom_basis.extend(ys)
        blocks.append(Block(sector, kind, list(range(d0, d0 + len(ys))), [], None))
    result = SVDResult(dom, cod, dom_basis, cod_basis, rank, shifts, [])
    problems = check_svd(A, result, codomain_rank=rank)
    for b in blocks:
        if b.kind == "image" and not b.zero_length and b.size != p:
            problems.append(f"positive-length block of size {b.size} in sector {b.sector}")
    return PTupleSVD(p, k, result, blocks, problems)


def p_cyclic_barcode(data: CyclicActionData, repaired: RepairResult | None = None) -> tuple:
    """Image-mode verbose barcode of the fixture cone assembled from p-tuple SVDs."""
    repaired = repaired or repair_to_group_action(data)
    cone = data.cone
    bars, svds = [], []
    for k in cone.degrees:
        if not cone.space(k).dim:
            continue
        if cone.space(k + 1).dim:
            res = p_cyclic_svd(cone, k, repaired.T, repaired.S, data.p)
            svds.append(res)
            bars.extend(res.bars())
    return Barcode(bars, "verbose", cone.gamma), svds


# ---------------------------------------------------------------------------
# Multiplicity checks
# ---------------------------------------------------------------------------


def verify_p_tuple_multiplicity(bc: Barcode, p: int) -> bool:
    """Every distinct concise bar has multiplicity divisible by ``p``."""
    counts = bc.concise().counter()
    return all(m % p == 0 for m in counts.values())


def divisibility_invariant(bc: Barcode, p: int, degree: int | None = None) -> Fraction:
    """``max_s (beta_{sp+1} - beta_{(s+1)p})`` on descending concise finite lengths, ``beta_j = 0`` past the end."""
    degrees = bc.degrees() if degree is None else [degree]
    best = Fraction(0)
    for k in degrees:
        betas = [b for b in bc.concise().finite_lengths(k) if b != 0]
        m = len(betas)
        for s in range(math.ceil(m / p)):
            hi = betas[s * p]
            lo = betas[(s + 1) * p - 1] if (s + 1) * p <= m else Fraction(0)
            best = max(best, hi - lo)
    return best


def beta(bc: Barcode, k: int, j: int) -> Fraction:
    """``beta_j`` (1-based) of the degree-``k`` concise finite lengths, 0 past the end."""
    betas = [b for b in bc.concise().finite_lengths(k) if b != 0]
    return betas[j - 1] if 1 <= j <= len(betas) else Fraction(0)
