"""Filtered vector spaces over the Novikov field and their singular value decompositions.

Vectors are sparse dicts ``{basis index: NovikovScalar}``; absent keys are zero.
The defining basis of every ``FilteredSpace`` is declared orthogonal, so
``l(sum c_i e_i) = max_i (l(e_i) - nu(c_i))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence

from .coefficients import (
    ConfigurationError,
    CyclotomicRational,
    DomainError,
    ExponentGroup,
    NovikovScalar,
    PreconditionError,
    as_scalar,
    format_rational,
    parse_rational,
)

NEG_INF = -math.inf

Vector = dict  # {index: NovikovScalar}


# ---------------------------------------------------------------------------
# Spaces
# ---------------------------------------------------------------------------


class FilteredSpace:
    """Finite-dimensional space with an orthogonal defining basis."""

    __slots__ = ("labels", "filtrations", "gamma", "prime", "_index")

    def __init__(
        self,
        labels: Sequence[str],
        filtrations: Sequence,
        gamma: ExponentGroup | None = None,
        prime: int = 2,
    ):
        labels = tuple(str(x) for x in labels)
        filtrations = tuple(parse_rational(f) for f in filtrations)
        if len(labels) != len(filtrations):
            raise PreconditionError("labels and filtrations differ in length")
        index = {label: i for i, label in enumerate(labels)}
        if len(index) != len(labels):
            raise PreconditionError("labels must be distinct")
        self.labels = labels
        self.filtrations = filtrations
        self.gamma = gamma if gamma is not None else ExponentGroup.trivial()
        self.prime = prime
        self._index = index

    @classmethod
    def empty(cls, prime: int = 2, gamma: ExponentGroup | None = None) -> "FilteredSpace":
        return cls((), (), gamma, prime)

    @property
    def dim(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self._index[label]

    def same_field(self, other: "FilteredSpace") -> bool:
        return self.prime == other.prime and self.gamma == other.gamma

    def scalar(self, value) -> NovikovScalar:
        return as_scalar(value, self.prime, self.gamma)

    def zero(self) -> NovikovScalar:
        return NovikovScalar.zero(self.prime, self.gamma)

    def one(self) -> NovikovScalar:
        return NovikovScalar.one(self.prime, self.gamma)

    def unit(self, i: int) -> Vector:
        return {i: self.one()}

    def vector(self, coords) -> Vector:
        """Normalize a dense sequence or a sparse mapping to a sparse vector."""
        if isinstance(coords, Mapping):
            items = coords.items()
        else:
            coords = list(coords)
            if len(coords) != self.dim:
                raise PreconditionError(f"expected {self.dim} coordinates, got {len(coords)}")
            items = enumerate(coords)
        out = {}
        for i, c in items:
            if not 0 <= i < self.dim:
                raise PreconditionError(f"coordinate index {i} out of range")
            s = self.scalar(c)
            if s.prime != self.prime or s.gamma != self.gamma:
                raise ConfigurationError("vector entries live over a different field")
            if s:
                out[i] = s
        return out

    def dense(self, v: Vector) -> list:
        z = self.zero()
        return [v.get(i, z) for i in range(self.dim)]

    def __eq__(self, other):
        return (
            isinstance(other, FilteredSpace)
            and self.labels == other.labels
            and self.filtrations == other.filtrations
            and self.gamma == other.gamma
            and self.prime == other.prime
        )

    def __hash__(self):
        return hash((self.labels, self.filtrations, self.gamma, self.prime))

    def __repr__(self):
        return f"FilteredSpace(dim={self.dim}, prime={self.prime}, gamma={self.gamma!r})"

    def to_json(self) -> dict:
        return {
            "prime": self.prime,
            "gamma": self.gamma.to_json(),
            "labels": list(self.labels),
            "filtrations": [format_rational(f) for f in self.filtrations],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "FilteredSpace":
        return cls(
            data["labels"],
            [parse_rational(f) for f in data["filtrations"]],
            ExponentGroup.from_json(data.get("gamma", [])),
            int(data["prime"]),
        )


# ---------------------------------------------------------------------------
# Sparse vector helpers
# ---------------------------------------------------------------------------


def _axpy(x: dict, c, y: dict) -> dict:
    """Return ``x + c*y``."""
    out = dict(x)
    for k, v in y.items():
        term = v * c
        cur = out.get(k)
        if cur is not None:
            term = cur + term
        if term:
            out[k] = term
        else:
            out.pop(k, None)
    return out


def _lincomb(a, x: dict, b, y: dict) -> dict:
    """Return ``a*x + b*y``."""
    out = {}
    for k, v in x.items():
        t = v * a
        if t:
            out[k] = t
    for k, v in y.items():
        t = v * b
        cur = out.get(k)
        if cur is not None:
            t = cur + t
        if t:
            out[k] = t
        else:
            out.pop(k, None)
    return out


def vec_add(x: Vector, y: Vector) -> Vector:
    return _lincomb(1, x, 1, y)


def vec_sub(x: Vector, y: Vector) -> Vector:
    return _lincomb(1, x, -1, y)


def vec_scale(c, x: Vector) -> Vector:
    return {k: v * c for k, v in x.items() if v * c}


def vec_equal(x: Vector, y: Vector) -> bool:
    keys = set(x) | set(y)
    for k in keys:
        a, b = x.get(k), y.get(k)
        if a is None or b is None:
            if (a is not None and a) or (b is not None and b):
                return False
        elif a != b:
            return False
    return True


# ---------------------------------------------------------------------------
# Maps
# ---------------------------------------------------------------------------


class FilteredMap:
    """Sparse matrix of Novikov scalars, stored by columns (codomain rows x domain columns)."""

    __slots__ = ("domain", "codomain", "columns")

    def __init__(self, domain: FilteredSpace, codomain: FilteredSpace, columns: Sequence[Mapping] = None):
        if not domain.same_field(codomain):
            raise ConfigurationError("domain and codomain live over different fields")
        if columns is None:
            columns = [{} for _ in range(domain.dim)]
        if len(columns) != domain.dim:
            raise PreconditionError("column count does not match the domain dimension")
        cols = []
        for col in columns:
            clean = {}
            for i, s in col.items():
                if not 0 <= i < codomain.dim:
                    raise PreconditionError(f"row index {i} out of range")
                s = codomain.scalar(s)
                if s:
                    clean[i] = s
            cols.append(clean)
        self.domain = domain
        self.codomain = codomain
        self.columns = tuple(cols)

    @classmethod
    def _make(cls, domain, codomain, columns) -> "FilteredMap":
        obj = object.__new__(cls)
        obj.domain = domain
        obj.codomain = codomain
        obj.columns = tuple(columns)
        return obj

    @classmethod
    def zero(cls, domain: FilteredSpace, codomain: FilteredSpace) -> "FilteredMap":
        return cls._make(domain, codomain, [{} for _ in range(domain.dim)])

    @classmethod
    def identity(cls, space: FilteredSpace) -> "FilteredMap":
        one = space.one()
        return cls._make(space, space, [{j: one} for j in range(space.dim)])

    @classmethod
    def from_dense(cls, domain: FilteredSpace, codomain: FilteredSpace, rows: Sequence[Sequence]) -> "FilteredMap":
        if len(rows) != codomain.dim:
            raise PreconditionError("row count does not match the codomain dimension")
        cols = [{} for _ in range(domain.dim)]
        for i, row in enumerate(rows):
            if len(row) != domain.dim:
                raise PreconditionError("row length does not match the domain dimension")
            for j, v in enumerate(row):
                cols[j][i] = v
        return cls(domain, codomain, cols)

    @classmethod
    def from_triplets(cls, domain, codomain, triplets: Iterable) -> "FilteredMap":
        cols = [{} for _ in range(domain.dim)]
        for i, j, v in triplets:
            s = codomain.scalar(v)
            cols[j][i] = cols[j][i] + s if i in cols[j] else s
        return cls(domain, codomain, cols)

    @property
    def shape(self) -> tuple:
        return (self.codomain.dim, self.domain.dim)

    def entry(self, i: int, j: int) -> NovikovScalar:
        return self.columns[j].get(i, self.codomain.zero())

    def to_dense(self) -> list:
        z = self.codomain.zero()
        return [[self.columns[j].get(i, z) for j in range(self.domain.dim)] for i in range(self.codomain.dim)]

    def nnz(self) -> int:
        return sum(len(c) for c in self.columns)

    def is_zero(self) -> bool:
        return not any(self.columns)

    def apply(self, v: Mapping) -> Vector:
        out: dict = {}
        for j, c in v.items():
            if c:
                out = _axpy(out, c, self.columns[j])
        return out

    def __call__(self, v: Mapping) -> Vector:
        return self.apply(v)

    def __matmul__(self, other: "FilteredMap") -> "FilteredMap":
        if other.codomain.dim != self.domain.dim:
            raise PreconditionError("dimension mismatch in composition")
        return FilteredMap._make(other.domain, self.codomain, [self.apply(col) for col in other.columns])

    def _check_same_shape(self, other: "FilteredMap"):
        if self.shape != other.shape:
            raise PreconditionError("maps differ in shape")

    def __add__(self, other: "FilteredMap") -> "FilteredMap":
        self._check_same_shape(other)
        return FilteredMap._make(self.domain, self.codomain, [vec_add(a, b) for a, b in zip(self.columns, other.columns)])

    def __sub__(self, other: "FilteredMap") -> "FilteredMap":
        self._check_same_shape(other)
        return FilteredMap._make(self.domain, self.codomain, [vec_sub(a, b) for a, b in zip(self.columns, other.columns)])

    def __neg__(self) -> "FilteredMap":
        return self.scale(-1)

    def scale(self, c) -> "FilteredMap":
        if not isinstance(c, (int, Fraction)):
            c = self.codomain.scalar(c)
        return FilteredMap._make(self.domain, self.codomain, [vec_scale(c, col) for col in self.columns])

    def __pow__(self, n: int) -> "FilteredMap":
        if self.domain.dim != self.codomain.dim:
            raise PreconditionError("powers need a square map")
        if n < 0:
            raise PreconditionError("use invert_perturbed for negative powers")
        result = FilteredMap.identity(self.domain)
        base = self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        # keep the declared spaces of self
        return FilteredMap._make(self.domain, self.codomain, result.columns)

    def truncate(self, order) -> "FilteredMap":
        return FilteredMap._make(
            self.domain,
            self.codomain,
            [{i: s.truncate(order) for i, s in col.items() if s.truncate(order)} for col in self.columns],
        )

    def with_spaces(self, domain: FilteredSpace, codomain: FilteredSpace) -> "FilteredMap":
        if domain.dim != self.domain.dim or codomain.dim != self.codomain.dim:
            raise PreconditionError("dimension mismatch")
        return FilteredMap._make(domain, codomain, self.columns)

    def equals(self, other: "FilteredMap") -> bool:
        return self.shape == other.shape and all(vec_equal(a, b) for a, b in zip(self.columns, other.columns))

    def __eq__(self, other):
        if not isinstance(other, FilteredMap):
            return NotImplemented
        return self.domain == other.domain and self.codomain == other.codomain and self.equals(other)

    __hash__ = None

    def shift_bound(self):
        """Smallest ``delta`` with ``l(A e_j) <= l(e_j) + delta`` for every basis ``e_j``."""
        best = NEG_INF
        for j, col in enumerate(self.columns):
            if col:
                best = max(best, filtration_of(self.codomain, col) - self.domain.filtrations[j])
        return best

    def __repr__(self):
        return f"FilteredMap({self.codomain.dim}x{self.domain.dim}, nnz={self.nnz()})"

    def to_json(self) -> dict:
        entries = []
        for j, col in enumerate(self.columns):
            for i in sorted(col):
                entries.append([i, j, col[i].to_json()])
        entries.sort(key=lambda e: (e[0], e[1]))
        return {"domain": self.domain.to_json(), "codomain": self.codomain.to_json(), "entries": entries}

    @classmethod
    def from_json(cls, data: Mapping) -> "FilteredMap":
        dom = FilteredSpace.from_json(data["domain"])
        cod = FilteredSpace.from_json(data["codomain"])
        triplets = [(int(i), int(j), NovikovScalar.from_json(s, cod.prime, cod.gamma)) for i, j, s in data["entries"]]
        return cls.from_triplets(dom, cod, triplets)


# ---------------------------------------------------------------------------
# Filtration and orthogonality
# ---------------------------------------------------------------------------


def filtration_of(space: FilteredSpace, coords):
    """``max_i (l(e_i) - nu(c_i))``; ``-inf`` for the zero vector."""
    if not isinstance(coords, Mapping):
        coords = space.vector(coords)
    best = NEG_INF
    filt = space.filtrations
    for i, c in coords.items():
        if i >= space.dim:
            raise PreconditionError("vector has more coordinates than the space")
        if c:
            level = filt[i] - c.valuation
            if level > best:
                best = level
    return best


def _reduction(space: FilteredSpace, v: Mapping) -> dict:
    top = filtration_of(space, v)
    if top == NEG_INF:
        raise PreconditionError("zero vector has no zero-level reduction")
    filt = space.filtrations
    return {i: c.leading_coefficient() for i, c in v.items() if c and filt[i] - c.valuation == top}


def reduce_to_zero_level(space: FilteredSpace, vectors: Sequence) -> list:
    """Zero-level reductions as dense columns over ``Q(xi_p)``.

    Each vector is rescaled to filtration 0 (conceptually after extending the
    exponent group to all of R); what survives is the leading coefficient on
    each basis direction attaining the top level.
    """
    zero = CyclotomicRational.zero(space.prime)
    out = []
    for v in vectors:
        v = v if isinstance(v, Mapping) else space.vector(v)
        red = _reduction(space, v)
        out.append(tuple(red.get(i, zero) for i in range(space.dim)))
    return out


class _KEchelon:
    """Incremental echelon form over Q(xi_p) for independence tests."""

    def __init__(self):
        self.pivots: list = []  # (row, normalized vector)

    def reduce(self, v: dict) -> dict:
        v = dict(v)
        for r, pv in self.pivots:
            c = v.get(r)
            if c:
                v = _axpy(v, -c, pv)
        return v

    def add(self, v: dict) -> bool:
        v = self.reduce(v)
        if not v:
            return False
        r = min(v)
        inv = v[r].inverse()
        self.pivots.append((r, {k: x * inv for k, x in v.items()}))
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)


def k_rank(columns: Iterable) -> int:
    """Rank over ``Q(xi_p)`` of sparse or dense columns of cyclotomic values."""
    ech = _KEchelon()
    for col in columns:
        if not isinstance(col, Mapping):
            col = {i: c for i, c in enumerate(col) if c}
        ech.add(col)
    return ech.rank


def is_orthogonal(space: FilteredSpace, vectors: Sequence) -> bool:
    """True iff the zero-level reductions are linearly independent over ``Q(xi_p)``."""
    ech = _KEchelon()
    for v in vectors:
        v = v if isinstance(v, Mapping) else space.vector(v)
        if not ech.add(_reduction(space, v)):
            return False
    return True


def complete_orthogonal(space: FilteredSpace, vectors: Sequence, candidates: Sequence) -> list:
    """Indices of ``candidates`` that greedily extend an orthogonal family.

    Works because orthogonality of a family is independence of its
    zero-level reductions, which is a matroid condition.
    """
    ech = _KEchelon()
    for v in vectors:
        if not ech.add(_reduction(space, v)):
            raise PreconditionError("starting family is not orthogonal")
    chosen = []
    for idx, c in enumerate(candidates):
        if c and ech.add(_reduction(space, c)):
            chosen.append(idx)
    return chosen


# ---------------------------------------------------------------------------
# Optimal pair and singular value decomposition
# ---------------------------------------------------------------------------


class Pivot(NamedTuple):
    column: int
    row: int


def _column_best(col: Mapping, lcod) -> tuple:
    best = None
    row = None
    for i, s in col.items():
        sc = lcod[i] - s.valuation
        if best is None or sc > best or (sc == best and i < row):
            best, row = sc, i
    return best, row


def optimal_pair(A: FilteredMap) -> Pivot:
    """Entry maximizing ``l_cod(w_i) - nu(A_ij) - l_dom(v_j)``; ties go to the smallest (row, column)."""
    best = None
    for j, col in enumerate(A.columns):
        if not col:
            continue
        sc, row = _column_best(col, A.codomain.filtrations)
        key = (sc - A.domain.filtrations[j], -row, -j)
        if best is None or key > best:
            best = key
    if best is None:
        raise DomainError("the zero map has no optimal pair")
    return Pivot(column=-best[2], row=-best[1])


@dataclass
class SVDResult:
    """Paired orthogonal bases realizing the singular value decomposition of one map.

    ``domain_basis[:rank]`` map onto ``codomain_basis[:rank]``; the remaining
    domain vectors span the kernel.  ``pivots`` records the (row, column)
    choices in the order the elimination made them.
    """

    domain: FilteredSpace
    codomain: FilteredSpace
    domain_basis: list
    codomain_basis: list
    rank: int
    shifts: list
    pivots: list = field(default_factory=list)

    @property
    def kernel_basis(self) -> list:
        return self.domain_basis[self.rank :]

    @property
    def image_basis(self) -> list:
        return self.codomain_basis[: self.rank]

    def domain_levels(self) -> list:
        return [filtration_of(self.domain, y) for y in self.domain_basis]

    def codomain_levels(self) -> list:
        return [filtration_of(self.codomain, x) for x in self.codomain_basis]

    def to_json(self) -> dict:
        def vec(space, v):
            return [[i, v[i].to_json()] for i in sorted(v)]

        return {
            "rank": self.rank,
            "shifts": [format_rational(s) for s in self.shifts],
            "pivots": [list(p) for p in self.pivots],
            "domain_basis": [vec(self.domain, y) for y in self.domain_basis],
            "codomain_basis": [vec(self.codomain, x) for x in self.codomain_basis],
            "image_levels": [format_rational(filtration_of(self.codomain, x)) for x in self.image_basis],
            "domain": self.domain.to_json(),
            "codomain": self.codomain.to_json(),
        }


def svd(A: FilteredMap, complete_codomain: bool = True) -> SVDResult:
    """Singular value decomposition by repeated optimal-pair column elimination.

    Each step pivots on the optimal entry ``(i0, j0)`` and clears row ``i0``
    from every other live column with ``v_j <- v_j - c v_j0``.  That keeps
    ``l(v_j)`` fixed and never raises ``l(A v_j)``, so the pivot images form a
    triangular, hence orthogonal, family.  When the pivot entry is not a
    monomial the step is done fraction-free and renormalized by the inverse of
    its leading term, which keeps everything exact.
    """
    dom, cod = A.domain, A.codomain
    n = dom.dim
    raw = dom.gamma.is_trivial
    p = dom.prime
    if raw:
        imgs = [{i: s.terms[0][1] for i, s in col.items()} for col in A.columns]
        one = CyclotomicRational.one(p)
    else:
        imgs = [dict(col) for col in A.columns]
        one = NovikovScalar.one(p, dom.gamma)
    ys = [{j: one} for j in range(n)]
    lcod, ldom = cod.filtrations, dom.filtrations

    cache = {}
    for j in range(n):
        if imgs[j]:
            sc, row = _column_best(imgs[j], lcod)
            cache[j] = (sc - ldom[j], row)

    pivots: list = []
    scores: list = []
    while cache:
        j0 = max(cache, key=lambda j: (cache[j][0], -cache[j][1], -j))
        score, i0 = cache.pop(j0)
        pivots.append((i0, j0))
        scores.append(score)
        a = imgs[j0][i0]
        pcol, py = imgs[j0], ys[j0]
        if a.is_monomial():
            a_inv = a.inverse()
            for j in list(cache):
                b = imgs[j].get(i0)
                if b is None:
                    continue
                c = -(b * a_inv)
                imgs[j] = _axpy(imgs[j], c, pcol)
                ys[j] = _axpy(ys[j], c, py)
                if imgs[j]:
                    sc, row = _column_best(imgs[j], lcod)
                    cache[j] = (sc - ldom[j], row)
                else:
                    del cache[j]
        else:
            u = a.leading_term().inverse()
            alpha = u * a
            for j in list(cache):
                b = imgs[j].get(i0)
                if b is None:
                    continue
                beta = -(u * b)
                imgs[j] = _lincomb(alpha, imgs[j], beta, pcol)
                ys[j] = _lincomb(alpha, ys[j], beta, py)
                if imgs[j]:
                    sc, row = _column_best(imgs[j], lcod)
                    cache[j] = (sc - ldom[j], row)
                else:
                    del cache[j]

    order = sorted(range(len(pivots)), key=lambda k: scores[k])  # stable: shifts non-increasing
    pivot_cols = [pivots[k][1] for k in order]
    pivot_col_set = set(pivot_cols)
    dom_basis = [ys[j] for j in pivot_cols] + [ys[j] for j in range(n) if j not in pivot_col_set]
    cod_basis = [imgs[j] for j in pivot_cols]
    if complete_codomain:
        pivot_rows = {pivots[k][0] for k in range(len(pivots))}
        cod_basis += [{i: one} for i in range(cod.dim) if i not in pivot_rows]
    if raw:
        g = dom.gamma
        dom_basis = [{k: NovikovScalar.constant(c, gamma=g) for k, c in v.items()} for v in dom_basis]
        cod_basis = [{k: NovikovScalar.constant(c, gamma=g) for k, c in v.items()} for v in cod_basis]
    shifts = [-scores[k] for k in order]
    return SVDResult(dom, cod, dom_basis, cod_basis, len(pivots), shifts, pivots)


def plain_rank(A: FilteredMap) -> int:
    """Rank by fraction-free elimination, ignoring filtrations entirely."""
    pivots: list = []
    for col in A.columns:
        v = dict(col)
        for r, pv in pivots:
            b = v.get(r)
            if b is not None:
                v = _lincomb(pv[r], v, -b, pv)
        if v:
            pivots.append((min(v), v))
    return len(pivots)


def check_svd(A: FilteredMap, result: SVDResult, codomain_rank: int | None = None) -> list:
    """List the clauses of the SVD definition that ``result`` violates (empty when valid)."""
    problems = []
    r = result.rank
    n = A.domain.dim
    oracle = plain_rank(A)
    if r != oracle:
        problems.append(f"rank {r} differs from elimination rank {oracle}")
    if len(result.domain_basis) != n:
        problems.append("domain basis has the wrong size")
    for i in range(min(r, len(result.codomain_basis))):
        if not vec_equal(A.apply(result.domain_basis[i]), result.codomain_basis[i]):
            problems.append(f"A y_{i} != x_{i}")
    for i in range(r, len(result.domain_basis)):
        if A.apply(result.domain_basis[i]):
            problems.append(f"y_{i} is not in the kernel")
    shifts = [
        filtration_of(A.domain, result.domain_basis[i]) - filtration_of(A.codomain, result.codomain_basis[i])
        for i in range(r)
    ]
    if shifts != list(result.shifts):
        problems.append("recorded shifts disagree with the bases")
    if any(shifts[i] < shifts[i + 1] for i in range(len(shifts) - 1)):
        problems.append("shifts are not non-increasing")
    if result.domain_basis and not is_orthogonal(A.domain, result.domain_basis):
        problems.append("domain basis is not orthogonal")
    if result.codomain_basis and not is_orthogonal(A.codomain, result.codomain_basis):
        problems.append("codomain basis is not orthogonal")
    expected = A.codomain.dim if codomain_rank is None else codomain_rank
    if len(result.codomain_basis) not in (expected, r):
        problems.append("codomain basis has the wrong size")
    return problems


# ---------------------------------------------------------------------------
# Subspace helpers
# ---------------------------------------------------------------------------


def abstract_space(space: FilteredSpace, basis: Sequence, prefix: str = "b") -> FilteredSpace:
    """Space whose defining basis stands for the (orthogonal) vectors ``basis`` of ``space``."""
    return FilteredSpace(
        [f"{prefix}{i}" for i in range(len(basis))],
        [filtration_of(space, v) for v in basis],
        space.gamma,
        space.prime,
    )


def span_basis(space: FilteredSpace, vectors: Sequence) -> list:
    """Orthogonal basis of the span of ``vectors``."""
    vectors = [v for v in vectors if v]
    if not vectors:
        return []
    dom = FilteredSpace([f"v{i}" for i in range(len(vectors))], [0] * len(vectors), space.gamma, space.prime)
    res = svd(FilteredMap._make(dom, space, vectors), complete_codomain=False)
    return res.image_basis


def kernel_basis(A: FilteredMap) -> list:
    return svd(A, complete_codomain=False).kernel_basis


def coordinates(basis: Sequence, targets: Sequence) -> list:
    """Coefficients expressing each target in terms of ``basis`` (assumed independent).

    Needs exact division, so every pivot must be a monomial; this always holds
    when the exponent group is trivial.
    """
    pivots: list = []  # (row, reduced vector, combination over basis indices)
    for k, b in enumerate(basis):
        v = dict(b)
        combo = {k: 1}
        for r, pv, pc in pivots:
            c = v.get(r)
            if c is not None:
                f = -(c * pv[r].inverse())
                v = _axpy(v, f, pv)
                combo = _axpy_combo(combo, f, pc)
        if not v:
            raise PreconditionError("basis vectors are linearly dependent")
        r = _monomial_row(v)
        pivots.append((r, v, combo))
    out = []
    for t in targets:
        v = dict(t)
        coeffs: dict = {}
        for r, pv, pc in pivots:
            c = v.get(r)
            if c is not None:
                f = c * pv[r].inverse()
                v = _axpy(v, -f, pv)
                coeffs = _axpy_combo(coeffs, f, pc)
        if v:
            raise PreconditionError("target is not in the span of the basis")
        out.append(coeffs)
    return out


def _monomial_row(v: dict) -> int:
    for r in sorted(v):
        if v[r].is_monomial():
            return r
    raise DomainError("no monomial pivot available for exact division")


def _axpy_combo(x: dict, c, y: dict) -> dict:
    out = dict(x)
    for k, v in y.items():
        term = c * v if not isinstance(v, int) else (c if v == 1 else c * v)
        cur = out.get(k)
        if cur is not None:
            term = cur + term
        if term:
            out[k] = term
        else:
            out.pop(k, None)
    return out


def combine(basis: Sequence, coeffs: Mapping) -> Vector:
    """``sum_k coeffs[k] * basis[k]``."""
    out: dict = {}
    for k, c in coeffs.items():
        out = _axpy(out, c, basis[k])
    return out


def restrict_map(A: FilteredMap, dom_basis: Sequence, cod_basis: Sequence) -> FilteredMap:
    """Matrix of ``A`` from ``span(dom_basis)`` to ``span(cod_basis)`` in those bases."""
    dom = abstract_space(A.domain, dom_basis, "d")
    cod = abstract_space(A.codomain, cod_basis, "c")
    images = [A.apply(v) for v in dom_basis]
    coords = coordinates(cod_basis, images)
    one = A.codomain.one()
    cols = [{i: (one * c if isinstance(c, int) else c) for i, c in col.items()} for col in coords]
    return FilteredMap(dom, cod, cols)
