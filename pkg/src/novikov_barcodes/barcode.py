"""Verbose and concise barcodes, tensor-product rules and stability comparisons."""

from __future__ import annotations

import csv
import io
import math
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .coefficients import (
    ExponentGroup,
    PreconditionError,
    format_rational,
    parse_rational,
)
from .complexes import ConeComplex, FilteredChainComplex, verify_complex
from .filtered_linalg import (
    FilteredSpace,
    complete_orthogonal,
    filtration_of,
    svd,
)

INF = math.inf


@dataclass(frozen=True)
class Bar:
    degree: int
    endpoint: Fraction
    length: object  # Fraction or math.inf

    def __post_init__(self):
        if self.length != INF and self.length < 0:
            raise ValueError("bar length must be non-negative")

    @property
    def is_infinite(self) -> bool:
        return self.length == INF

    def sort_key(self) -> tuple:
        return (-self.length, self.endpoint, self.degree)

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "endpoint": format_rational(self.endpoint),
            "length": "inf" if self.is_infinite else format_rational(self.length),
        }

    @classmethod
    def from_json(cls, data) -> "Bar":
        length = data["length"]
        return cls(int(data["degree"]), parse_rational(data["endpoint"]), INF if length == "inf" else parse_rational(length))


def _parse_length(text: str):
    return INF if text == "inf" else parse_rational(text)


class Barcode:
    """Multiset of bars, either verbose or concise (no zero-length bars)."""

    def __init__(self, bars: Iterable[Bar] = (), kind: str = "verbose", gamma: ExponentGroup | None = None):
        if kind not in ("verbose", "concise"):
            raise ValueError(f"unknown barcode kind {kind!r}")
        self.gamma = gamma if gamma is not None else ExponentGroup.trivial()
        bars = [Bar(b.degree, self.gamma.representative(b.endpoint), b.length) for b in bars]
        if kind == "concise":
            bars = [b for b in bars if b.length != 0]
        self.bars = tuple(sorted(bars, key=Bar.sort_key))
        self.kind = kind

    def concise(self) -> "Barcode":
        return Barcode(self.bars, "concise", self.gamma)

    def degrees(self) -> list:
        return sorted({b.degree for b in self.bars})

    def at(self, k: int) -> list:
        return [b for b in self.bars if b.degree == k]

    def multiplicity(self, k: int | None = None) -> int:
        return len(self.bars) if k is None else len(self.at(k))

    def multiplicities(self) -> dict:
        return dict(sorted(Counter(b.degree for b in self.bars).items()))

    def finite_lengths(self, k: int | None = None) -> list:
        bars = self.bars if k is None else self.at(k)
        return sorted((b.length for b in bars if not b.is_infinite), reverse=True)

    def infinite_count(self, k: int | None = None) -> int:
        bars = self.bars if k is None else self.at(k)
        return sum(1 for b in bars if b.is_infinite)

    def zero_length_count(self) -> int:
        return sum(1 for b in self.bars if b.length == 0)

    def counter(self) -> Counter:
        return Counter((b.degree, b.endpoint, b.length) for b in self.bars)

    def __len__(self) -> int:
        return len(self.bars)

    def __iter__(self):
        return iter(self.bars)

    def __eq__(self, other):
        if not isinstance(other, Barcode):
            return NotImplemented
        return self.kind == other.kind and self.gamma == other.gamma and self.bars == other.bars

    def same_bars(self, other: "Barcode") -> bool:
        return self.counter() == other.counter()

    def __repr__(self):
        return f"Barcode({self.kind}, {len(self.bars)} bars, multiplicities={self.multiplicities()})"

    def __add__(self, other: "Barcode") -> "Barcode":
        kind = "concise" if "concise" in (self.kind, other.kind) else "verbose"
        return Barcode(self.bars + other.bars, kind, self.gamma)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "gamma": self.gamma.to_json(),
            "bars": [b.to_json() for b in self.bars],
        }

    @classmethod
    def from_json(cls, data) -> "Barcode":
        gamma = ExponentGroup.from_json(data.get("gamma", []))
        return cls([Bar.from_json(b) for b in data["bars"]], data.get("kind", "verbose"), gamma)

    def csv_rows(self) -> list:
        collapsed = Counter(self.bars)
        rows = []
        for bar in sorted(collapsed, key=Bar.sort_key):
            e = Fraction(bar.endpoint)
            length = "inf" if bar.is_infinite else format_rational(bar.length)
            rows.append([bar.degree, e.numerator, e.denominator, length, collapsed[bar]])
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["degree", "endpoint_num", "endpoint_den", "length", "multiplicity"])
        w.writerows(self.csv_rows())
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, kind: str = "verbose", gamma: ExponentGroup | None = None) -> "Barcode":
        bars = []
        for row in csv.DictReader(io.StringIO(text)):
            bar = Bar(
                int(row["degree"]),
                Fraction(int(row["endpoint_num"]), int(row["endpoint_den"])),
                _parse_length(row["length"]),
            )
            bars.extend([bar] * int(row["multiplicity"]))
        return cls(bars, kind, gamma)


# ---------------------------------------------------------------------------
# Computing barcodes
# ---------------------------------------------------------------------------


def _boundary_svd(C: FilteredChainComplex, k: int, cache: dict | None):
    """SVD of ``d_k`` (``None`` when a side is zero-dimensional), memoized in ``cache``."""
    if cache is not None and k in cache:
        return cache[k]
    res = None
    if C.space(k).dim and C.space(k - 1).dim:
        res = svd(C.boundary(k), complete_codomain=False)
    if cache is not None:
        cache[k] = res
    return res


def barcode_of(
    C: FilteredChainComplex, k: int, codomain_mode: str = "kernel", _svds: dict | None = None
) -> Barcode:
    """Degree-``k`` verbose barcode from an SVD of ``d_{k+1}`` into ``ker d_k`` (or ``Im d_{k+1}``)."""
    if codomain_mode not in ("kernel", "image"):
        raise ValueError(f"unknown codomain mode {codomain_mode!r}")
    space = C.space(k)
    gamma = C.gamma
    if space.dim == 0:
        return Barcode([], "verbose", gamma)
    up = _boundary_svd(C, k + 1, _svds)
    down = _boundary_svd(C, k, _svds)
    if codomain_mode == "image":
        rank_up = up.rank if up else 0
        rank_down = down.rank if down else 0
        if space.dim - rank_up - rank_down:
            raise PreconditionError(f"homology is nonzero in degree {k}; image mode needs an acyclic degree")
    bars = []
    xs: list = []
    if up is not None:
        xs = up.image_basis
        for x, s in zip(xs, up.shifts):
            bars.append(Bar(k, filtration_of(space, x), s))
    if codomain_mode == "kernel":
        ker = down.kernel_basis if down is not None else [space.unit(i) for i in range(space.dim)]
        chosen = complete_orthogonal(space, xs, ker)
        for idx in chosen:
            bars.append(Bar(k, filtration_of(space, ker[idx]), INF))
    return Barcode(bars, "verbose", gamma)


def barcode(C: FilteredChainComplex, codomain_mode: str = "kernel", degrees: Iterable[int] | None = None) -> Barcode:
    """Verbose barcode over all (or the given) degrees."""
    svds: dict = {}
    out = []
    for k in C.degrees if degrees is None else degrees:
        out.extend(barcode_of(C, k, codomain_mode, svds).bars)
    return Barcode(out, "verbose", C.gamma)


def tensor_barcode(bc_C: Barcode, bc_D: Barcode) -> Barcode:
    """Barcode of a tensor product from the factors' barcodes.

    Pairing rules (bar degree is the degree of its lower end):

    * infinite x infinite: infinite bar, endpoints add;
    * finite x infinite (either order): the finite length survives, endpoints add;
    * finite ``L1`` x finite ``L2``: two bars of length ``min(L1, L2)``, one in
      the summed degree at the summed endpoint and one a degree higher,
      starting ``max(L1, L2)`` later.
    """
    if bc_C.gamma != bc_D.gamma:
        raise PreconditionError("barcodes live over different exponent groups")
    out = []
    for a in bc_C.bars:
        for b in bc_D.bars:
            deg = a.degree + b.degree
            e = a.endpoint + b.endpoint
            if a.is_infinite and b.is_infinite:
                out.append(Bar(deg, e, INF))
            elif a.is_infinite:
                out.append(Bar(deg, e, b.length))
            elif b.is_infinite:
                out.append(Bar(deg, e, a.length))
            else:
                m = min(a.length, b.length)
                out.append(Bar(deg, e, m))
                out.append(Bar(deg + 1, e + max(a.length, b.length), m))
    kind = "concise" if "concise" in (bc_C.kind, bc_D.kind) else "verbose"
    return Barcode(out, kind, bc_C.gamma)


def compare_barcodes(a: Barcode, b: Barcode, k: int | None = None) -> Fraction:
    """``max_i |beta_i(a) - beta_i(b)|`` over descending finite lengths, padded with zeros."""
    la, lb = a.finite_lengths(k), b.finite_lengths(k)
    n = max(len(la), len(lb))
    la = la + [Fraction(0)] * (n - len(la))
    lb = lb + [Fraction(0)] * (n - len(lb))
    return max((abs(x - y) for x, y in zip(la, lb)), default=Fraction(0))


# ---------------------------------------------------------------------------
# Stability probe
# ---------------------------------------------------------------------------


def default_group(C: FilteredChainComplex) -> Callable[[int, int], object]:
    """Perturbation groups: one per generator, or per source generator for cones."""
    if isinstance(C, ConeComplex):

        def key(k, i):
            label = C.space(k).labels[i]
            side, name = label.split(":", 1)
            return (k if side == "L" else k - 1, name)

        return key
    return lambda k, i: (k, i)


def perturb_filtrations(C: FilteredChainComplex, offsets: dict, group: Callable) -> FilteredChainComplex:
    spaces = {}
    for k in C.degrees:
        sp = C.space(k)
        filts = [f + offsets.get(group(k, i), 0) for i, f in enumerate(sp.filtrations)]
        spaces[k] = FilteredSpace(sp.labels, filts, sp.gamma, sp.prime)
    return FilteredChainComplex(
        spaces, {k: C.boundary(k) for k in C.degrees}, 0, C.prime, C.gamma
    )


def _monotone(C: FilteredChainComplex) -> bool:
    return all(v.kind != "strictness" for v in verify_complex(C).violations)


@dataclass
class StabilityReport:
    delta: Fraction
    bound: Fraction
    deviations: list = field(default_factory=list)  # (seed, degree, deviation)
    skipped: list = field(default_factory=list)
    infinite_count_mismatches: list = field(default_factory=list)

    @property
    def max_deviation(self) -> Fraction:
        return max((d for _, _, d in self.deviations), default=Fraction(0))

    @property
    def violations(self) -> list:
        return [t for t in self.deviations if t[2] > self.bound]

    @property
    def ok(self) -> bool:
        return not self.violations and not self.infinite_count_mismatches

    def to_json(self) -> dict:
        return {
            "delta": format_rational(self.delta),
            "bound": format_rational(self.bound),
            "max_deviation": format_rational(self.max_deviation),
            "samples": len({s for s, _, _ in self.deviations}),
            "skipped_seeds": list(self.skipped),
            "violations": [[s, k, format_rational(d)] for s, k, d in self.violations],
            "ok": self.ok,
        }


def stability_probe(
    C: FilteredChainComplex,
    delta,
    seeds: Sequence[int] | int = 100,
    codomain_mode: str = "kernel",
    group: Callable | None = None,
    uniform: bool = False,
    resolution: int = 8,
) -> StabilityReport:
    """Perturb filtrations by at most ``delta`` per group and compare barcodes degree by degree.

    Deviations above ``4 delta`` are flagged.  Seeds whose perturbation breaks
    the monotonicity of the boundary are skipped and reported.
    """
    delta = parse_rational(delta)
    group = group or default_group(C)
    seeds = range(seeds) if isinstance(seeds, int) else seeds
    report = StabilityReport(delta, 4 * delta)
    base = barcode(C, codomain_mode)
    keys = sorted({group(k, i) for k in C.degrees for i in range(C.space(k).dim)}, key=repr)
    for seed in seeds:
        rng = random.Random(seed)
        if uniform:
            offsets = dict.fromkeys(keys, delta)
        else:
            offsets = {key: delta * Fraction(rng.randint(-resolution, resolution), resolution) for key in keys}
        P = perturb_filtrations(C, offsets, group)
        if not _monotone(P):
            report.skipped.append(seed)
            continue
        other = barcode(P, codomain_mode)
        for k in C.degrees:
            report.deviations.append((seed, k, compare_barcodes(base, other, k)))
            if base.infinite_count(k) != other.infinite_count(k):
                report.infinite_count_mismatches.append((seed, k))
    return report
