"""Filtered chain complexes, self-mapping cones, double maps and tensor products.

A graded map is a dict ``{degree: FilteredMap}``; degree-preserving maps send
``C_k`` to ``C_k`` and the boundary ``d_k`` sends ``C_k`` to ``C_{k-1}``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .coefficients import (
    ConfigurationError,
    CyclotomicRational,
    ExponentGroup,
    NovikovScalar,
    PreconditionError,
    format_rational,
    parse_rational,
)
from .filtered_linalg import (
    NEG_INF,
    FilteredMap,
    FilteredSpace,
    filtration_of,
    plain_rank,
)


class FilteredChainComplex:
    """Graded filtered spaces ``C_k`` with boundaries ``d_k: C_k -> C_{k-1}``."""

    def __init__(
        self,
        spaces: Mapping[int, FilteredSpace],
        boundaries: Mapping[int, FilteredMap] | None = None,
        strictness=0,
        prime: int | None = None,
        gamma: ExponentGroup | None = None,
    ):
        if spaces:
            degs = sorted(spaces)
            if degs != list(range(degs[0], degs[-1] + 1)):
                raise PreconditionError("degrees must form a contiguous range")
            first = spaces[degs[0]]
            prime = first.prime if prime is None else prime
            gamma = first.gamma if gamma is None else gamma
            self.lo, self.hi = degs[0], degs[-1]
        else:
            self.lo, self.hi = 0, -1
        self.prime = prime if prime is not None else 2
        self.gamma = gamma if gamma is not None else ExponentGroup.trivial()
        self._empty = FilteredSpace.empty(self.prime, self.gamma)
        self.spaces = {k: spaces[k] for k in self.degrees}
        for s in self.spaces.values():
            if s.prime != self.prime or s.gamma != self.gamma:
                raise ConfigurationError("all degrees must share the coefficient field")
        boundaries = boundaries or {}
        self.boundaries = {}
        for k in self.degrees:
            dom, cod = self.space(k), self.space(k - 1)
            d = boundaries.get(k)
            if d is None:
                d = FilteredMap.zero(dom, cod)
            elif d.shape != (cod.dim, dom.dim):
                raise PreconditionError(f"boundary in degree {k} has shape {d.shape}")
            else:
                d = d.with_spaces(dom, cod)
            self.boundaries[k] = d
        for k in boundaries:
            if k not in self.spaces and not boundaries[k].is_zero():
                raise PreconditionError(f"boundary given in degree {k} outside the complex")
        self.strictness = parse_rational(strictness)

    @property
    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def space(self, k: int) -> FilteredSpace:
        return self.spaces.get(k, self._empty)

    def boundary(self, k: int) -> FilteredMap:
        d = self.boundaries.get(k)
        if d is None:
            return FilteredMap.zero(self.space(k), self.space(k - 1))
        return d

    def dims(self) -> dict:
        return {k: self.space(k).dim for k in self.degrees}

    def total_dim(self) -> int:
        return sum(self.dims().values())

    def __repr__(self):
        return f"{type(self).__name__}(dims={self.dims()})"

    def to_json(self) -> dict:
        return {
            "prime": self.prime,
            "gamma": self.gamma.to_json(),
            "strictness": format_rational(self.strictness),
            "degrees": [
                {
                    "degree": k,
                    "space": self.space(k).to_json(),
                    "boundary": [
                        [i, j, s.to_json()]
                        for j, col in enumerate(self.boundary(k).columns)
                        for i, s in sorted(col.items())
                    ],
                }
                for k in self.degrees
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "FilteredChainComplex":
        prime = int(data["prime"])
        gamma = ExponentGroup.from_json(data.get("gamma", []))
        spaces = {}
        raw_bd = {}
        for entry in data["degrees"]:
            k = int(entry["degree"])
            spaces[k] = FilteredSpace.from_json(entry["space"])
            raw_bd[k] = entry.get("boundary", [])
        empty = FilteredSpace.empty(prime, gamma)
        boundaries = {}
        for k, triplets in raw_bd.items():
            dom, cod = spaces[k], spaces.get(k - 1, empty)
            boundaries[k] = FilteredMap.from_triplets(
                dom, cod, [(int(i), int(j), NovikovScalar.from_json(s, prime, gamma)) for i, j, s in triplets]
            )
        return cls(spaces, boundaries, parse_rational(data.get("strictness", "0")), prime, gamma)


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: str  # "d^2" or "strictness"
    degree: int
    column: int
    detail: str = ""


@dataclass
class ComplexReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def verify_complex(C: FilteredChainComplex) -> ComplexReport:
    """Flag columns breaking ``d o d = 0`` or ``l(d c) <= l(c) - strictness``."""
    out = []
    for k in C.degrees:
        d = C.boundary(k)
        dd = C.boundary(k - 1) @ d
        for j, col in enumerate(dd.columns):
            if col:
                out.append(Violation("d^2", k, j, f"d_{k - 1} d_{k} column {j} is nonzero"))
        dom, cod = C.space(k), C.space(k - 1)
        for j, col in enumerate(d.columns):
            if col:
                level = filtration_of(cod, col)
                if level > dom.filtrations[j] - C.strictness:
                    out.append(
                        Violation("strictness", k, j, f"l(d e) = {level} exceeds {dom.filtrations[j]} - {C.strictness}")
                    )
    return ComplexReport(out)


def homology_ranks(C: FilteredChainComplex) -> dict:
    """``dim H_k`` from unfiltered elimination ranks."""
    ranks = {k: plain_rank(C.boundary(k)) for k in range(C.lo, C.hi + 2)}
    return {k: C.space(k).dim - ranks.get(k, 0) - ranks.get(k + 1, 0) for k in C.degrees}


# ---------------------------------------------------------------------------
# Graded maps
# ---------------------------------------------------------------------------


def graded_identity(C: FilteredChainComplex) -> dict:
    return {k: FilteredMap.identity(C.space(k)) for k in C.degrees}


def graded_compose(F: Mapping, G: Mapping) -> dict:
    return {k: F[k] @ G[k] for k in G}


def is_chain_map(C: FilteredChainComplex, F: Mapping, D: FilteredChainComplex | None = None) -> bool:
    """``d_D F = F d_C`` in every degree (degree-0 map)."""
    D = C if D is None else D
    for k in C.degrees:
        Fk = F.get(k)
        Fk1 = F.get(k - 1)
        left = D.boundary(k) @ Fk if Fk is not None else None
        if Fk1 is None or C.space(k - 1).dim == 0:
            if left is not None and not left.is_zero():
                return False
            continue
        right = Fk1 @ C.boundary(k)
        if left is None:
            if not right.is_zero():
                return False
        elif not left.equals(right):
            return False
    return True


def _check_graded(C: FilteredChainComplex, F: Mapping, name: str):
    for k in C.degrees:
        if k not in F:
            raise PreconditionError(f"{name} is missing degree {k}")
        if F[k].shape != (C.space(k).dim, C.space(k).dim):
            raise PreconditionError(f"{name} has the wrong shape in degree {k}")


def _shift_map(C, T: Mapping, k: int, shift) -> FilteredMap:
    Tk = T[k].with_spaces(C.space(k), C.space(k))
    if shift is None or (not isinstance(shift, NovikovScalar) and not shift):
        return Tk
    return Tk - FilteredMap.identity(C.space(k)).scale(C.space(k).scalar(shift))


# ---------------------------------------------------------------------------
# Cones
# ---------------------------------------------------------------------------


class ConeComplex(FilteredChainComplex):
    """``Cone_k = C_k (+) C_{k-1}`` with ``d_co = [[d, -(T - s)], [0, -d]]``.

    Left summand first; labels ``L:name`` and ``R:name``.
    """

    source: FilteredChainComplex
    maps: dict
    shift: object

    def left_index(self, k: int, i: int) -> int:
        return i

    def right_index(self, k: int, i: int) -> int:
        return self.source.space(k).dim + i

    def split(self, k: int, v: Mapping) -> tuple:
        """Split a cone vector into its (left, right) source components."""
        n = self.source.space(k).dim
        left = {i: c for i, c in v.items() if i < n}
        right = {i - n: c for i, c in v.items() if i >= n}
        return left, right

    def to_json(self) -> dict:
        data = super().to_json()
        data["provenance"] = {
            "source": self.source.to_json(),
            "maps": {str(k): self.maps[k].to_json() for k in sorted(self.maps)},
            "shift": NovikovScalar.constant(self.shift).to_json()
            if isinstance(self.shift, CyclotomicRational)
            else (self.shift.to_json() if isinstance(self.shift, NovikovScalar) else format_rational(Fraction(self.shift))),
        }
        return data


def _cone_space(C: FilteredChainComplex, k: int) -> FilteredSpace:
    left, right = C.space(k), C.space(k - 1)
    return FilteredSpace(
        [f"L:{x}" for x in left.labels] + [f"R:{x}" for x in right.labels],
        list(left.filtrations) + list(right.filtrations),
        C.gamma,
        C.prime,
    )


def build_cone(C: FilteredChainComplex, T: Mapping, scalar_shift=None, check: bool = True) -> ConeComplex:
    """Self-mapping cone of ``T - scalar_shift * I`` (default shift ``xi_p``)."""
    if scalar_shift is None:
        scalar_shift = CyclotomicRational.xi(C.prime)
    _check_graded(C, T, "T")
    T = {k: T[k].with_spaces(C.space(k), C.space(k)) for k in C.degrees}
    if check:
        if not is_chain_map(C, T):
            raise PreconditionError("T does not commute with the boundary")
        for k in C.degrees:
            if T[k].shift_bound() > 0:
                raise PreconditionError(f"T raises filtration in degree {k}")
    M = {k: _shift_map(C, T, k, scalar_shift) for k in C.degrees}
    lo, hi = C.lo, C.hi + 1
    spaces = {k: _cone_space(C, k) for k in range(lo, hi + 1)}
    boundaries = {}
    for k in range(lo, hi + 1):
        nk, nk1 = C.space(k).dim, C.space(k - 1).dim
        cols = []
        for col in C.boundary(k).columns:  # L:x -> L:(d x)
            cols.append(dict(col))
        if nk1:
            Mk1 = M[k - 1]
            d_low = C.boundary(k - 1)
            for j in range(nk1):  # R:x -> L:-(T - s)x + R:-(d x)
                col = {i: -s for i, s in Mk1.columns[j].items()}
                for i, s in d_low.columns[j].items():
                    col[nk1 + i] = -s
                cols.append(col)
        boundaries[k] = FilteredMap(spaces[k], spaces.get(k - 1, FilteredSpace.empty(C.prime, C.gamma)), cols)
        del nk
    cone = ConeComplex(spaces, boundaries, 0, C.prime, C.gamma)
    cone.source = C
    cone.maps = T
    cone.shift = scalar_shift
    if check:
        report = verify_complex(cone)
        if not report.ok:
            raise PreconditionError(f"cone construction failed: {report.violations[:3]}")
    return cone


def _block_diag(cone: ConeComplex, A: Mapping, k: int) -> FilteredMap:
    C = cone.source
    nk = C.space(k).dim
    cols = []
    if nk:
        cols.extend(dict(col) for col in A[k].columns)
    if C.space(k - 1).dim:
        cols.extend({nk + i: s for i, s in col.items()} for col in A[k - 1].columns)
    sp = cone.space(k)
    return FilteredMap(sp, sp, cols)


def double_map(cone: ConeComplex, A: Mapping, check: bool = True) -> dict:
    """Block-diagonal action ``(x1, x2) -> (A x1, A x2)`` on every cone degree."""
    C = cone.source
    _check_graded(C, A, "A")
    A = {k: A[k].with_spaces(C.space(k), C.space(k)) for k in C.degrees}
    D = {k: _block_diag(cone, A, k) for k in cone.degrees}
    if check:
        if not is_chain_map(C, A):
            raise PreconditionError("A does not commute with the boundary")
        for k in C.degrees:
            if not (A[k] @ cone.maps[k]).equals(cone.maps[k] @ A[k]):
                raise PreconditionError(f"A does not commute with T in degree {k}")
        if not is_chain_map(cone, D):
            raise PreconditionError("double map is not a chain map on the cone")
    return D


# ---------------------------------------------------------------------------
# Tensor products
# ---------------------------------------------------------------------------


def _tensor_layout(C: FilteredChainComplex, D: FilteredChainComplex, m: int) -> list:
    """Ordered (i, a, b) triples spanning degree ``m`` of ``C (x) D``."""
    out = []
    for i in C.degrees:
        j = m - i
        if j < D.lo or j > D.hi:
            continue
        for a in range(C.space(i).dim):
            for b in range(D.space(j).dim):
                out.append((i, a, b))
    return out


def tensor_product(C: FilteredChainComplex, D: FilteredChainComplex) -> FilteredChainComplex:
    """Koszul-signed tensor product with ``l(a (x) b) = l(a) + l(b)``."""
    if C.prime != D.prime or C.gamma != D.gamma:
        raise ConfigurationError("tensor factors must share the coefficient field")
    if not C.spaces or not D.spaces:
        return FilteredChainComplex({}, {}, 0, C.prime, C.gamma)
    lo, hi = C.lo + D.lo, C.hi + D.hi
    layouts = {m: _tensor_layout(C, D, m) for m in range(lo, hi + 1)}
    index = {m: {t: n for n, t in enumerate(layouts[m])} for m in layouts}
    spaces = {}
    for m, lay in layouts.items():
        labels, filts = [], []
        for i, a, b in lay:
            sa, sb = C.space(i), D.space(m - i)
            labels.append(f"{sa.labels[a]}⊗{sb.labels[b]}")
            filts.append(sa.filtrations[a] + sb.filtrations[b])
        spaces[m] = FilteredSpace(labels, filts, C.gamma, C.prime)
    boundaries = {}
    for m, lay in layouts.items():
        cols = []
        low = index.get(m - 1, {})
        for i, a, b in lay:
            j = m - i
            col: dict = {}
            for r, s in C.boundary(i).columns[a].items():
                key = low[(i - 1, r, b)]
                col[key] = s
            sign = -1 if i % 2 else 1
            for r, s in D.boundary(j).columns[b].items():
                key = low[(i, a, r)]
                val = s * sign
                col[key] = col[key] + val if key in col else val
            cols.append(col)
        boundaries[m] = FilteredMap(spaces[m], spaces.get(m - 1, FilteredSpace.empty(C.prime, C.gamma)), cols)
    return FilteredChainComplex(spaces, boundaries, min(C.strictness, D.strictness), C.prime, C.gamma)


def tensor_maps(C: FilteredChainComplex, D: FilteredChainComplex, F: Mapping, G: Mapping) -> dict:
    """Degree-0 map ``F (x) G`` on ``C (x) D``."""
    out = {}
    P = tensor_product(C, D)
    for m in P.degrees:
        lay = _tensor_layout(C, D, m)
        index = {t: n for n, t in enumerate(lay)}
        cols = []
        for i, a, b in lay:
            col: dict = {}
            for ra, sa in F[i].columns[a].items():
                for rb, sb in G[m - i].columns[b].items():
                    key = index[(i, ra, rb)]
                    val = sa * sb
                    col[key] = col[key] + val if key in col else val
            cols.append(col)
        out[m] = FilteredMap(P.space(m), P.space(m), cols)
    return out


def unit_complex(prime: int, gamma: ExponentGroup | None = None, label: str = "1") -> FilteredChainComplex:
    """One generator in degree 0 with filtration 0."""
    return FilteredChainComplex({0: FilteredSpace([label], [0], gamma, prime)}, {}, 0, prime, gamma)


def betti_complex(
    ranks, prime: int, gamma: ExponentGroup | None = None, start: int = 0, filtrations=None
) -> FilteredChainComplex:
    """Zero-boundary complex with ``ranks[i]`` generators in degree ``start + i``."""
    spaces = {}
    for i, r in enumerate(ranks):
        k = start + i
        filt = [0] * r if filtrations is None else list(filtrations[i])
        spaces[k] = FilteredSpace([f"m{k}_{n}" for n in range(r)], filt, gamma, prime)
    return FilteredChainComplex(spaces, {}, 0, prime, gamma)


def cone_tensor_iso_check(
    C: FilteredChainComplex, T: Mapping, D: FilteredChainComplex, scalar_shift=None
) -> bool:
    """Compare ``Cone_{C(x)D}(T(x)I - s)`` with ``Cone_C(T - s) (x) D`` under the canonical relabeling.

    The relabeling ``L:(a(x)b) <-> (L:a)(x)b``, ``R:(a(x)b) <-> (R:a)(x)b``
    must carry labels, filtrations and boundary entries across exactly.
    """
    if scalar_shift is None:
        scalar_shift = CyclotomicRational.xi(C.prime)
    ident_D = graded_identity(D)
    P = tensor_product(C, D)
    TP = tensor_maps(C, D, T, ident_D)
    left = build_cone(P, TP, scalar_shift)
    right = tensor_product(build_cone(C, T, scalar_shift), D)

    def canon(label: str) -> str:
        # "L:a⊗b" and "L:a⊗b" coincide textually once the side tag is leading
        return label

    if list(left.degrees) != list(right.degrees):
        return False
    for m in left.degrees:
        ls, rs = left.space(m), right.space(m)
        if ls.dim != rs.dim:
            return False
        try:
            perm = [rs.index(canon(lab)) for lab in ls.labels]
        except KeyError:
            return False
        for a, b in enumerate(perm):
            if ls.filtrations[a] != rs.filtrations[b]:
                return False
    for m in left.degrees:
        ls, rs = left.space(m), right.space(m)
        ls1, rs1 = left.space(m - 1), right.space(m - 1)
        row_perm = {n: rs1.index(lab) for n, lab in enumerate(ls1.labels)}
        dl, dr = left.boundary(m), right.boundary(m)
        for a, lab in enumerate(ls.labels):
            b = rs.index(lab)
            mapped = {row_perm[i]: s for i, s in dl.columns[a].items()}
            target = dr.columns[b]
            if set(mapped) != set(target) or any(mapped[i] != target[i] for i in target):
                return False
    return True


@dataclass
class ConeIsomorphism:
    source: ConeComplex
    target: ConeComplex
    forward: dict
    inverse: dict


def cone_homotopy_iso(
    C: FilteredChainComplex, phi: Mapping, psi: Mapping, K: Mapping, scalar_shift=0
) -> ConeIsomorphism:
    """Filtered isomorphism ``F = [[I, -K], [0, I]]`` from ``Cone(phi - s)`` to ``Cone(psi - s)``.

    Requires ``phi - psi = K d + d K`` with ``K_k: C_k -> C_{k+1}`` filtration preserving.
    """
    for k in C.degrees:
        dk = C.boundary(k)
        Kk1 = K.get(k - 1)
        Kk = K.get(k)
        lhs = phi[k] - psi[k]
        total = FilteredMap.zero(C.space(k), C.space(k))
        if Kk is not None and C.space(k + 1).dim:
            total = total + (C.boundary(k + 1) @ Kk.with_spaces(C.space(k), C.space(k + 1)))
        if Kk1 is not None and C.space(k - 1).dim:
            total = total + (Kk1.with_spaces(C.space(k - 1), C.space(k)) @ dk)
        if not lhs.equals(total):
            raise PreconditionError(f"phi - psi != K d + d K in degree {k}")
        if Kk is not None and C.space(k + 1).dim and Kk.with_spaces(C.space(k), C.space(k + 1)).shift_bound() > 0:
            raise PreconditionError(f"K raises filtration in degree {k}")
    src = build_cone(C, phi, scalar_shift)
    tgt = build_cone(C, psi, scalar_shift)
    forward, inverse = {}, {}
    for k in src.degrees:
        nk, nk1 = C.space(k).dim, C.space(k - 1).dim
        sp = src.space(k)
        one = sp.one()
        fcols, icols = [], []
        for j in range(nk):
            fcols.append({j: one})
            icols.append({j: one})
        Kk1 = K.get(k - 1)
        for j in range(nk1):
            fc = {nk + j: one}
            ic = {nk + j: one}
            if Kk1 is not None and nk:
                for i, s in Kk1.columns[j].items():
                    fc[i] = -s
                    ic[i] = s
            fcols.append(fc)
            icols.append(ic)
        forward[k] = FilteredMap(sp, tgt.space(k), fcols)
        inverse[k] = FilteredMap(tgt.space(k), sp, icols)
    for k in src.degrees:
        if src.space(k - 1).dim:
            if not (tgt.boundary(k) @ forward[k]).equals(forward[k - 1] @ src.boundary(k)):
                raise PreconditionError(f"F is not a chain map in degree {k}")
        ident = FilteredMap.identity(src.space(k))
        if not (inverse[k] @ forward[k]).equals(ident) or not (forward[k] @ inverse[k]).equals(ident):
            raise PreconditionError(f"F is not invertible in degree {k}")
        if forward[k].shift_bound() > 0 or inverse[k].shift_bound() > 0:
            raise PreconditionError(f"F raises filtration in degree {k}")
    return ConeIsomorphism(src, tgt, forward, inverse)


# ---------------------------------------------------------------------------
# Random complexes (seeded)
# ---------------------------------------------------------------------------


def _random_unit(rng: random.Random, prime: int, gamma: ExponentGroup, max_exp: int = 2) -> NovikovScalar:
    coeff = CyclotomicRational.rational(prime, rng.choice([1, -1, 2, -2, Fraction(1, 2)]))
    if prime > 2 and rng.random() < 0.3:
        coeff = coeff * CyclotomicRational.xi(prime, rng.randrange(1, prime))
    exp = 0 if gamma.is_trivial else gamma.step * rng.randint(0, max_exp)
    return NovikovScalar.monomial(coeff, exp, gamma=gamma)


def random_complex(
    seed: int | random.Random,
    prime: int = 2,
    gamma: ExponentGroup | None = None,
    degrees: tuple = (0, 2),
    max_pairs: int = 2,
    max_free: int = 1,
    acyclic: bool = False,
    strictness=0,
    mixing: int = 4,
    spread: int = 3,
) -> FilteredChainComplex:
    """Seeded small complex: elementary pieces, mixed by a random change of basis.

    Filtrations are assigned afterwards so that ``d`` lowers them by at least
    ``strictness``; ties are frequent on purpose.
    """
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    gamma = gamma if gamma is not None else ExponentGroup.trivial()
    lo, hi = degrees
    strictness = parse_rational(strictness)
    pairs = {k: rng.randint(0, max_pairs) for k in range(lo + 1, hi + 1)}  # pairs d: k -> k-1
    free = {k: (0 if acyclic else rng.randint(0, max_free)) for k in range(lo, hi + 1)}
    # basis of degree k: [targets of pairs from k+1] + [sources of pairs to k-1] + [free]
    dims = {k: pairs.get(k + 1, 0) + pairs.get(k, 0) + free[k] for k in range(lo, hi + 1)}
    zero = NovikovScalar.zero(prime, gamma)
    mats = {}
    for k in range(lo, hi + 1):
        rows = dims.get(k - 1, 0)
        M = [[zero] * dims[k] for _ in range(rows)]
        if k > lo:
            off = pairs.get(k + 1, 0)
            for n in range(pairs.get(k, 0)):
                M[n][off + n] = _random_unit(rng, prime, gamma)
        mats[k] = M
    for k in range(lo, hi + 1):
        n = dims[k]
        for _ in range(mixing if n > 1 else 0):
            a, b = rng.sample(range(n), 2)
            c = _random_unit(rng, prime, gamma)
            # basis change E = I + c E_ab on C_k: d_k <- d_k E^{-1}, d_{k+1} <- E d_{k+1}
            Mk = mats[k]
            for row in Mk:
                if row[a]:
                    row[b] = row[b] - c * row[a]
            if k + 1 in mats:
                Mup = mats[k + 1]
                Mup[a] = [x + c * y for x, y in zip(Mup[a], Mup[b])]
    spaces = {}
    half = Fraction(1, 2)
    for k in range(lo, hi + 1):
        filts = []
        M = mats[k]
        for j in range(dims[k]):
            base = Fraction(rng.randint(-spread, spread)) + (half if rng.random() < 0.3 else 0)
            if k > lo:
                need = NEG_INF
                prev = spaces[k - 1].filtrations
                for i in range(dims[k - 1]):
                    s = M[i][j]
                    if s:
                        need = max(need, prev[i] - s.valuation + strictness)
                if need != NEG_INF:
                    base = need if rng.random() < 0.5 else max(base, need) + rng.choice([0, half, 1])
            filts.append(base)
        spaces[k] = FilteredSpace([f"e{k}_{j}" for j in range(dims[k])], filts, gamma, prime)
    boundaries = {}
    empty = FilteredSpace.empty(prime, gamma)
    for k in range(lo, hi + 1):
        cod = spaces.get(k - 1, empty)
        boundaries[k] = FilteredMap.from_dense(spaces[k], cod, mats[k]) if cod.dim else FilteredMap.zero(spaces[k], cod)
    return FilteredChainComplex(spaces, boundaries, strictness, prime, gamma)


def random_chain_map(
    C: FilteredChainComplex, seed: int | random.Random, terms: int = 3, lower_by=None
) -> dict:
    """A filtration non-increasing chain map of the form ``a I + d K + K d``.

    ``K`` is a random degree +1 map whose entries only connect generators
    allowed by the filtration (lowering it by ``lower_by`` when given).
    """
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    K = random_homotopy(C, rng, terms, lower_by)
    a = CyclotomicRational.rational(C.prime, rng.choice([1, 2, -1]))
    out = {}
    for k in C.degrees:
        m = FilteredMap.identity(C.space(k)).scale(C.space(k).scalar(a))
        out[k] = m + homotopy_term(C, K, k)
    return out


def random_homotopy(C: FilteredChainComplex, seed, terms: int = 3, lower_by=None) -> dict:
    """Random ``K_k: C_k -> C_{k+1}`` with ``l(K e) <= l(e) - lower_by`` (``0`` by default)."""
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    lower_by = Fraction(0) if lower_by is None else parse_rational(lower_by)
    K = {}
    for k in C.degrees:
        dom, cod = C.space(k), C.space(k + 1)
        cols = [{} for _ in range(dom.dim)]
        if cod.dim:
            for _ in range(terms):
                j = rng.randrange(dom.dim) if dom.dim else None
                if j is None:
                    break
                i = rng.randrange(cod.dim)
                s = _random_unit(rng, C.prime, C.gamma)
                # need l_cod(i) - nu(s) <= l_dom(j) - lower_by; raise valuation if the group allows
                gap = cod.filtrations[i] - dom.filtrations[j] + lower_by
                if gap > s.valuation:
                    if C.gamma.is_trivial:
                        continue
                    steps = -(-(gap - s.valuation) // C.gamma.step)
                    s = s.shift(C.gamma.step * steps)
                cols[j][i] = s
        K[k] = FilteredMap(dom, cod, cols)
    return K


def homotopy_term(C: FilteredChainComplex, K: Mapping, k: int) -> FilteredMap:
    """``(d K + K d)`` restricted to degree ``k``."""
    total = FilteredMap.zero(C.space(k), C.space(k))
    if k in K and C.space(k + 1).dim:
        total = total + C.boundary(k + 1) @ K[k]
    if (k - 1) in K and C.space(k - 1).dim:
        total = total + K[k - 1] @ C.boundary(k)
    return total
