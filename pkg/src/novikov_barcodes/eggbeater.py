"""Combinatorial egg-beater model, its self-mapping cone, and product multiplicities.

Generators are pairs ``(A, j)``: a sign sequence of length ``2p`` (stored as
the set ``A`` of ``+`` positions) and an orbit position ``j`` in ``Z_p``.  The
degree is ``|A| - p + 1``.  The boundary is the Koszul contraction with the
all-ones covector, tensored with the identity on ``Z_p``; the rotation moves
``j`` to ``j + 1``.  Both the boundary and the action model are choices made
here: only acyclicity, equivariance, orbit-constant actions and gaps of size
proportional to ``lambda`` matter for the multiplicity counts.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .barcode import INF, Barcode, barcode, barcode_of, tensor_barcode
from .coefficients import (
    CyclotomicRational,
    ExponentGroup,
    NovikovScalar,
    PreconditionError,
    format_rational,
    is_prime,
    parse_rational,
)
from .complexes import (
    ConeComplex,
    FilteredChainComplex,
    build_cone,
    graded_identity,
    tensor_maps,
    tensor_product,
    verify_complex,
)
from .filtered_linalg import FilteredMap, FilteredSpace

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# Sign sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SignSequence:
    """``2p`` signs; entry ``2j`` is sign(x_{2j}) and entry ``2j+1`` is -sign(y_{2j})."""

    entries: tuple

    def __post_init__(self):
        if len(self.entries) % 2 or not self.entries:
            raise ValueError("a sign sequence has even positive length 2p")
        if any(e not in (1, -1) for e in self.entries):
            raise ValueError("entries must be +1 or -1")

    @property
    def p(self) -> int:
        return len(self.entries) // 2

    @classmethod
    def from_xy(cls, xs: Sequence[int], ys: Sequence[int]) -> "SignSequence":
        out = []
        for x, y in zip(xs, ys):
            out.extend([x, -y])
        return cls(tuple(out))

    @classmethod
    def from_positions(cls, p: int, plus: Sequence[int]) -> "SignSequence":
        s = set(plus)
        return cls(tuple(1 if i in s else -1 for i in range(2 * p)))

    def plus_positions(self) -> tuple:
        return tuple(i for i, e in enumerate(self.entries) if e == 1)

    def __str__(self):
        return "".join("+" if e == 1 else "-" for e in self.entries)


def cz_index(seq: SignSequence) -> int:
    """``1 + (1/2) sum_j (sign x_{2j} - sign y_{2j})``."""
    return 1 + sum(seq.entries) // 2


def degree_counts(p: int) -> dict:
    """Number of sign sequences per CZ index, by enumeration."""
    counts: dict = {}
    for bits in range(1 << (2 * p)):
        seq = SignSequence(tuple(1 if bits >> i & 1 else -1 for i in range(2 * p)))
        k = cz_index(seq)
        counts[k] = counts.get(k, 0) + 1
    return dict(sorted(counts.items()))


# ---------------------------------------------------------------------------
# The model
# ---------------------------------------------------------------------------


@dataclass
class EggBeaterModel:
    p: int
    lam: Fraction
    seed: int
    complex: FilteredChainComplex
    rotation: dict  # degree -> FilteredMap
    jitter: dict  # sign-sequence string -> Fraction in (0, 1/2)

    @property
    def degrees(self) -> range:
        return self.complex.degrees

    def orbit_of(self, label: str) -> str:
        return label.split("|", 1)[0]


def _label(p: int, A: tuple, j: int) -> str:
    return f"{SignSequence.from_positions(p, A)}|{j}"


def build_model(p: int, lam=1, seed: int = 0, gamma: ExponentGroup | None = None) -> EggBeaterModel:
    """Seeded egg-beater complex at prime ``p`` and action scale ``lam``.

    ``gamma`` defaults to the trivial group; pass ``ExponentGroup([lam])`` to
    allow the homotopy perturbations of :func:`perturbed_rotation`.
    """
    if not is_prime(p):
        raise PreconditionError(f"p = {p} is not prime")
    lam = parse_rational(lam)
    if lam <= 0:
        raise PreconditionError("lambda must be positive")
    gamma = gamma if gamma is not None else ExponentGroup.trivial()
    n = 2 * p
    rng = random.Random(seed)
    M = 4 * (1 << n)
    draws = rng.sample(range(1, M), 1 << n)
    subsets = {a: list(combinations(range(n), a)) for a in range(n + 1)}
    jitter = {}
    it = iter(draws)
    for a in range(n + 1):
        for A in subsets[a]:
            jitter[str(SignSequence.from_positions(p, A))] = Fraction(next(it), 2 * M)
    spaces = {}
    index = {}
    for a in range(n + 1):
        k = a - p + 1
        labels, filts = [], []
        for A in subsets[a]:
            level = lam * a + lam * jitter[str(SignSequence.from_positions(p, A))]
            for j in range(p):
                index[(A, j)] = len(labels)
                labels.append(_label(p, A, j))
                filts.append(level)
        spaces[k] = FilteredSpace(labels, filts, gamma, p)
    one = NovikovScalar.one(p, gamma)
    boundaries = {}
    for a in range(1, n + 1):
        k = a - p + 1
        cols = []
        for A in subsets[a]:
            for j in range(p):
                col = {}
                for pos, i in enumerate(A):
                    B = A[:pos] + A[pos + 1 :]
                    col[index[(B, j)]] = one if pos % 2 == 0 else -one
                cols.append(col)
        boundaries[k] = FilteredMap(spaces[k], spaces[k - 1], cols)
    C = FilteredChainComplex(spaces, boundaries, lam / 2, p, gamma)
    rotation = {}
    for a in range(n + 1):
        k = a - p + 1
        cols = [{index[(A, (j + 1) % p)]: one} for A in subsets[a] for j in range(p)]
        rotation[k] = FilteredMap(spaces[k], spaces[k], cols)
    report = verify_complex(C)
    if not report.ok:
        raise AssertionError(f"egg-beater model is invalid: {report.violations[:3]}")
    return EggBeaterModel(p, lam, seed, C, rotation, jitter)


def perturbed_rotation(model: EggBeaterModel, seed: int, density: float = 0.2) -> tuple:
    """``T = R (I + d M + M d)`` with ``M`` strictly lowering filtration.

    Needs a nontrivial exponent group containing ``2 lam``: ``M`` raises degree,
    and every degree-``k+1`` action exceeds every degree-``k`` one, so ``M``
    can only lower filtration through a ``t^{2 lam}`` factor.  Returns
    ``(T, M)``.
    """
    C = model.complex
    shift = 2 * model.lam
    if C.gamma.is_trivial or not C.gamma.contains(shift):
        raise PreconditionError("perturbations need an exponent group containing 2*lambda")
    rng = random.Random(seed)
    Mmap = {}
    for k in C.degrees:
        dom, cod = C.space(k), C.space(k + 1)
        cols = [{} for _ in range(dom.dim)]
        for j in range(dom.dim):
            for i in range(cod.dim):
                if rng.random() < density / max(1, cod.dim) * 4:
                    c = CyclotomicRational.rational(model.p, rng.choice([1, -1, 2, Fraction(1, 2)]))
                    cols[j][i] = NovikovScalar.monomial(c, shift, gamma=C.gamma)
        Mmap[k] = FilteredMap(dom, cod, cols)
    T = {}
    for k in C.degrees:
        N = FilteredMap.zero(C.space(k), C.space(k))
        if C.space(k + 1).dim:
            N = N + C.boundary(k + 1) @ Mmap[k]
        if C.space(k - 1).dim:
            N = N + Mmap[k - 1] @ C.boundary(k)
        T[k] = model.rotation[k] @ (FilteredMap.identity(C.space(k)) + N)
    return T, Mmap


def egg_cone(model: EggBeaterModel, xi_power: int = 1, T: dict | None = None) -> ConeComplex:
    p = model.p
    if xi_power % p == 0:
        raise PreconditionError("the shift must be a primitive root of unity")
    return build_cone(model.complex, T or model.rotation, CyclotomicRational.xi(p, xi_power))


@dataclass
class DegreeReport:
    k: int
    verbose: int
    concise: int
    zero_length: int
    min_positive_length: Fraction | None

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "verbose": self.verbose,
            "concise": self.concise,
            "zero_length": self.zero_length,
            "min_positive_length": None
            if self.min_positive_length is None
            else format_rational(self.min_positive_length),
        }


@dataclass
class EggConeReport:
    p: int
    lam: Fraction
    seed: int
    xi_power: int
    perturbed: bool
    barcode: Barcode
    per_degree: list = field(default_factory=list)

    @property
    def concise_total(self) -> int:
        return sum(d.concise for d in self.per_degree)

    @property
    def zero_length_total(self) -> int:
        return sum(d.zero_length for d in self.per_degree)

    @property
    def verbose_total(self) -> int:
        return sum(d.verbose for d in self.per_degree)

    @property
    def min_positive_length(self) -> Fraction | None:
        vals = [d.min_positive_length for d in self.per_degree if d.min_positive_length is not None]
        return min(vals) if vals else None

    @property
    def nondivisible_degrees(self) -> list:
        return [d.k for d in self.per_degree if d.concise % self.p]

    def degree(self, k: int) -> DegreeReport:
        for d in self.per_degree:
            if d.k == k:
                return d
        raise KeyError(k)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "p": self.p,
            "lambda": format_rational(self.lam),
            "seed": self.seed,
            "xi_power": self.xi_power,
            "perturbed": self.perturbed,
            "per_degree": [d.to_json() for d in self.per_degree],
            "totals": {
                "verbose": self.verbose_total,
                "concise": self.concise_total,
                "zero_length": self.zero_length_total,
                "min_positive_length": None
                if self.min_positive_length is None
                else format_rational(self.min_positive_length),
            },
            "nondivisible_degrees": self.nondivisible_degrees,
        }


def summarize(bc: Barcode, degrees, p: int) -> list:
    out = []
    for k in degrees:
        bars = bc.at(k)
        positive = [b.length for b in bars if b.length != 0 and b.length != INF]
        out.append(
            DegreeReport(
                k,
                len(bars),
                sum(1 for b in bars if b.length != 0),
                sum(1 for b in bars if b.length == 0),
                min(positive) if positive else None,
            )
        )
    return out


def egg_cone_report(
    model: EggBeaterModel, xi_power: int = 1, perturb_seed: int | None = None
) -> EggConeReport:
    """Image-mode barcode of ``Cone(T - xi_p^q I)`` with per-degree multiplicities."""
    T = None
    if perturb_seed is not None:
        T, _ = perturbed_rotation(model, perturb_seed)
    cone = egg_cone(model, xi_power, T)
    bc = barcode(cone, "image")
    return EggConeReport(
        model.p,
        model.lam,
        model.seed,
        xi_power,
        perturb_seed is not None,
        bc,
        summarize(bc, cone.degrees, model.p),
    )


def expected_concise(p: int, k: int) -> int:
    return math.comb(2 * p, k + p - 1) if 0 <= k + p - 1 <= 2 * p else 0


def orbit_group(cone: ConeComplex):
    """Perturbation groups for stability probes: one per source orbit."""

    def key(k, i):
        side, name = cone.space(k).labels[i].split(":", 1)
        return (k if side == "L" else k - 1, name.split("|", 1)[0])

    return key


# ---------------------------------------------------------------------------
# Q_p
# ---------------------------------------------------------------------------


def q_matrix(p: int, xi_power: int = 1) -> FilteredMap:
    """``R_p - xi_p I`` on one orbit ``z_0, ..., z_{p-1}`` with ``R z_i = z_{i+1}``."""
    space = FilteredSpace([f"z{i}" for i in range(p)], [0] * p, None, p)
    xi = space.scalar(CyclotomicRational.xi(p, xi_power))
    one = space.one()
    cols = []
    for j in range(p):
        col = {j: -xi}
        nxt = (j + 1) % p
        col[nxt] = col[nxt] + one if nxt in col else one
        cols.append(col)
    return FilteredMap(space, space, cols)


def q_kernel_vector(p: int, xi_power: int = 1) -> dict:
    """``sum_i xi_p^{p-1-i} z_i``."""
    return {i: NovikovScalar.constant(CyclotomicRational.xi(p, xi_power * (p - 1 - i))) for i in range(p)}


# ---------------------------------------------------------------------------
# Products
# ---------------------------------------------------------------------------


def quantum_betti(betti: Sequence[int], N: int, k: int) -> int:
    """``qb_k = sum_s b_{k + 2Ns}``; ``N = 0`` means ``qb_k = b_k``."""
    if N < 0:
        raise ValueError("minimal Chern number must be non-negative")
    n = len(betti)
    if N == 0:
        return betti[k] if 0 <= k < n else 0
    period = 2 * N
    r = k % period
    return sum(betti[i] for i in range(r, n, period))


@dataclass(frozen=True)
class ProductMultiplicity:
    m1: int
    divisible: bool
    residue: int

    def to_json(self) -> dict:
        return {"m1": self.m1, "divisible": self.divisible, "residue": self.residue}


def product_multiplicity(p: int, betti: Sequence[int], N: int = 0) -> ProductMultiplicity:
    """Degree-1 concise multiplicity of the product cone and its residue mod ``p``."""
    m1 = sum(
        math.comb(2 * p, k + p - 1) * quantum_betti(betti, N, 1 - k) for k in range(-p + 1, p + 2)
    )
    residue = (quantum_betti(betti, N, p) + 2 * quantum_betti(betti, N, 0) + quantum_betti(betti, N, -p)) % p
    return ProductMultiplicity(m1, m1 % p == 0, residue)


@dataclass
class CrosscheckResult:
    direct: Barcode
    predicted: Barcode
    formula: ProductMultiplicity
    degree: int = 1

    @property
    def direct_multiplicity(self) -> int:
        return self.direct.multiplicity(self.degree)

    @property
    def predicted_multiplicity(self) -> int:
        return self.predicted.multiplicity(self.degree)

    @property
    def ok(self) -> bool:
        return (
            self.direct.same_bars(self.predicted)
            and self.direct_multiplicity == self.formula.m1
        )

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "direct": self.direct_multiplicity,
            "tensor_rule": self.predicted_multiplicity,
            "formula": self.formula.to_json(),
            "agree": self.ok,
        }


def product_cone_crosscheck(
    model: EggBeaterModel, D: FilteredChainComplex, xi_power: int = 1, degree: int = 1
) -> CrosscheckResult:
    """Degree-``degree`` concise barcode of ``Cone_{C(x)D}(T(x)I - xi I)`` two ways.

    ``D`` must have zero boundary; its degree ranks play the role of Betti
    numbers (with ``N = 0``) in the closed formula.
    """
    if any(not D.boundary(k).is_zero() for k in D.degrees):
        raise PreconditionError("the second factor must have zero boundary")
    C = model.complex
    xi = CyclotomicRational.xi(model.p, xi_power)
    P = tensor_product(C, D)
    TP = tensor_maps(C, D, model.rotation, graded_identity(D))
    cone = build_cone(P, TP, xi)
    direct = barcode_of(cone, degree, "image").concise()
    egg_bc = barcode(egg_cone(model, xi_power), "image").concise()
    predicted_all = tensor_barcode(egg_bc, barcode(D))
    predicted = Barcode(predicted_all.at(degree), "concise", C.gamma)
    if D.spaces and D.lo < 0:
        raise PreconditionError("factor degrees must start at 0 for the closed formula")
    betti = [D.space(k).dim for k in range(0, D.hi + 1)] if D.spaces else []
    formula = product_multiplicity(model.p, betti, 0)
    return CrosscheckResult(direct, predicted, formula, degree)
