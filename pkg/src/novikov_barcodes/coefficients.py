"""Exact arithmetic in Q(xi_p) and in the Novikov field over it.

A ``CyclotomicRational`` stores ``p - 1`` rational coordinates in the power
basis ``1, xi, ..., xi^(p-2)``.  A ``NovikovScalar`` is a finite formal sum
``sum a_g t^g`` with exponents in a finitely generated subgroup of Q and an
optional truncation order above which coefficients are unknown.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence, Union

INF = math.inf

Rational = Union[int, Fraction]


class ConfigurationError(ValueError):
    """Operands live over different primes or exponent groups."""


class DomainError(ValueError):
    """Operation undefined for the given input (e.g. inverting zero)."""


class PreconditionError(ValueError):
    """An input violates a documented precondition."""


def parse_rational(value) -> Fraction:
    """Accept ints, Fractions and ``"num/den"`` strings."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read {value!r} as an exact rational")


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in range(2, math.isqrt(n) + 1):
        if n % d == 0:
            return False
    return True


# ---------------------------------------------------------------------------
# Q(xi_p)
# ---------------------------------------------------------------------------

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _reduce_power_basis(prime: int, full: list) -> tuple:
    # full has length p in the basis 1..xi^(p-1); eliminate xi^(p-1).
    top = full[prime - 1]
    if top:
        return tuple(c - top for c in full[: prime - 1])
    return tuple(full[: prime - 1])


class CyclotomicRational:
    """Element of Q(xi_p) in canonical power-basis coordinates."""

    __slots__ = ("prime", "coords", "_hash")

    def __init__(self, prime: int, coords: Sequence[Rational]):
        if not is_prime(prime):
            raise PreconditionError(f"{prime} is not prime")
        coords = tuple(parse_rational(c) for c in coords)
        if len(coords) < prime - 1:
            coords = coords + (_ZERO,) * (prime - 1 - len(coords))
        elif len(coords) == prime:
            coords = _reduce_power_basis(prime, list(coords))
        elif len(coords) != prime - 1:
            raise PreconditionError(f"expected {prime - 1} coordinates, got {len(coords)}")
        self.prime = prime
        self.coords = coords
        self._hash = None

    @classmethod
    def _make(cls, prime: int, coords: tuple) -> "CyclotomicRational":
        obj = object.__new__(cls)
        obj.prime = prime
        obj.coords = coords
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, prime: int) -> "CyclotomicRational":
        return cls(prime, ())

    @classmethod
    def one(cls, prime: int) -> "CyclotomicRational":
        return cls(prime, (1,))

    @classmethod
    def rational(cls, prime: int, value: Rational) -> "CyclotomicRational":
        return cls(prime, (value,))

    @classmethod
    def xi(cls, prime: int, power: int = 1) -> "CyclotomicRational":
        full = [_ZERO] * prime
        full[power % prime] = _ONE
        return cls._make(prime, _reduce_power_basis(prime, full))

    # -- predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.coords)

    def __bool__(self) -> bool:
        return any(self.coords)

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    # Duck-typed helpers shared with NovikovScalar so elimination code can run
    # on either representation.
    @property
    def valuation(self):
        return INF if self.is_zero() else _ZERO

    def is_monomial(self) -> bool:
        return not self.is_zero()

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "CyclotomicRational":
        if isinstance(other, CyclotomicRational):
            if other.prime != self.prime:
                raise ConfigurationError("mismatched primes")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return CyclotomicRational.rational(self.prime, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return CyclotomicRational._make(self.prime, tuple(a + b for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicRational._make(self.prime, tuple(-a for a in self.coords))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return CyclotomicRational._make(self.prime, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if not other:
                return CyclotomicRational._make(self.prime, (_ZERO,) * (self.prime - 1))
            return CyclotomicRational._make(self.prime, tuple(a * other for a in self.coords))
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        p = self.prime
        if p == 2:
            return CyclotomicRational._make(2, (self.coords[0] * other.coords[0],))
        full = [_ZERO] * p
        for i, a in enumerate(self.coords):
            if not a:
                continue
            for j, b in enumerate(other.coords):
                if b:
                    k = i + j
                    if k >= p:
                        k -= p
                    full[k] += a * b
        return CyclotomicRational._make(p, _reduce_power_basis(p, full))

    __rmul__ = __mul__

    def galois(self, k: int) -> "CyclotomicRational":
        """Image under the automorphism xi -> xi^k (p does not divide k)."""
        p = self.prime
        if k % p == 0:
            raise PreconditionError("k must be a unit mod p")
        full = [_ZERO] * p
        for i, a in enumerate(self.coords):
            full[(i * k) % p] += a
        return CyclotomicRational._make(p, _reduce_power_basis(p, full))

    def norm(self) -> Fraction:
        prod = self
        for k in range(2, self.prime):
            prod = prod * self.galois(k)
        return prod.coords[0]

    def inverse(self) -> "CyclotomicRational":
        if self.is_zero():
            raise DomainError("zero has no inverse")
        p = self.prime
        if self.is_rational():
            return CyclotomicRational._make(p, (1 / self.coords[0],) + self.coords[1:])
        conj = CyclotomicRational.one(p)
        for k in range(2, p):
            conj = conj * self.galois(k)
        n = (self * conj).coords[0]
        return conj * (1 / n)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if not other:
                raise DomainError("division by zero")
            return self * (1 / Fraction(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = CyclotomicRational.one(self.prime)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparison and display ----------------------------------------------
    def __eq__(self, other):
        if isinstance(other, CyclotomicRational):
            return self.prime == other.prime and self.coords == other.coords
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.is_rational() and self.coords[0] == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.prime, self.coords))
        return self._hash

    def __repr__(self):
        return f"CyclotomicRational({self.prime}, {self})"

    def __str__(self):
        parts = []
        for i, c in enumerate(self.coords):
            if not c:
                continue
            mono = "" if i == 0 else ("xi" if i == 1 else f"xi^{i}")
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"

    def to_json(self) -> list:
        return [format_rational(c) for c in self.coords]

    @classmethod
    def from_json(cls, prime: int, data: Sequence[str]) -> "CyclotomicRational":
        return cls(prime, [parse_rational(c) for c in data])


def roots_of_unity(prime: int) -> list:
    """All roots of unity contained in Q(xi_p): the values +-xi^j."""
    out = []
    for j in range(prime):
        z = CyclotomicRational.xi(prime, j)
        out.append(z)
        if prime != 2:
            out.append(-z)
    if prime == 2:
        out = [CyclotomicRational.one(2), -CyclotomicRational.one(2)]
    return out


# ---------------------------------------------------------------------------
# Exponent groups
# ---------------------------------------------------------------------------


def _rational_gcd(values: Iterable[Fraction]) -> Fraction:
    def g(a: Fraction, b: Fraction) -> Fraction:
        return Fraction(
            math.gcd(a.numerator * b.denominator, b.numerator * a.denominator),
            a.denominator * b.denominator,
        )

    return reduce(g, values, Fraction(0))


class ExponentGroup:
    """Subgroup of Q generated by finitely many positive rationals.

    Any such group is cyclic, so membership and canonical representatives
    reduce to the single generator ``step`` (``0`` for the trivial group).
    """

    __slots__ = ("generators", "step")

    def __init__(self, generators: Sequence[Rational] = ()):
        gens = tuple(parse_rational(g) for g in generators)
        if any(g <= 0 for g in gens):
            raise PreconditionError("exponent group generators must be positive")
        self.generators = gens
        self.step = _rational_gcd(gens)

    @classmethod
    def trivial(cls) -> "ExponentGroup":
        return _TRIVIAL

    @property
    def is_trivial(self) -> bool:
        return self.step == 0

    def contains(self, x: Rational) -> bool:
        x = parse_rational(x)
        if self.step == 0:
            return x == 0
        return (x / self.step).denominator == 1

    def representative(self, x: Rational) -> Fraction:
        """Canonical representative of ``x mod Gamma``: ``x`` itself, or the value in ``[0, step)``."""
        x = parse_rational(x)
        if self.step == 0:
            return x
        return x - self.step * math.floor(x / self.step)

    def __eq__(self, other):
        return isinstance(other, ExponentGroup) and self.step == other.step

    def __hash__(self):
        return hash(("ExponentGroup", self.step))

    def __repr__(self):
        return f"ExponentGroup({[str(g) for g in self.generators]})"

    def to_json(self) -> list:
        return [format_rational(g) for g in self.generators]

    @classmethod
    def from_json(cls, data: Sequence[str]) -> "ExponentGroup":
        return cls([parse_rational(g) for g in data])


_TRIVIAL = ExponentGroup(())


# ---------------------------------------------------------------------------
# Novikov scalars
# ---------------------------------------------------------------------------


def _min_trunc(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class NovikovScalar:
    """Finite formal series ``sum a_g t^g`` over ``Q(xi_p)`` with exponents in ``gamma``.

    ``truncation`` (if not ``None``) means coefficients at exponents at or above
    it are unknown; no stored term reaches it.
    """

    __slots__ = ("prime", "gamma", "terms", "truncation", "_hash")

    def __init__(
        self,
        prime: int,
        terms: Iterable = (),
        gamma: ExponentGroup | None = None,
        truncation: Rational | None = None,
    ):
        gamma = gamma if gamma is not None else _TRIVIAL
        trunc = None if truncation is None else parse_rational(truncation)
        acc: dict = {}
        for exponent, coeff in terms:
            e = parse_rational(exponent)
            if not gamma.contains(e):
                raise ConfigurationError(f"exponent {e} is not in {gamma!r}")
            c = coeff if isinstance(coeff, CyclotomicRational) else CyclotomicRational.rational(prime, coeff)
            if c.prime != prime:
                raise ConfigurationError("coefficient prime mismatch")
            acc[e] = acc[e] + c if e in acc else c
        items = sorted((e, c) for e, c in acc.items() if c and (trunc is None or e < trunc))
        self.prime = prime
        self.gamma = gamma
        self.terms = tuple(items)
        self.truncation = trunc
        self._hash = None

    @classmethod
    def _make(cls, prime, gamma, terms: tuple, truncation=None) -> "NovikovScalar":
        obj = object.__new__(cls)
        obj.prime = prime
        obj.gamma = gamma
        obj.terms = terms
        obj.truncation = truncation
        obj._hash = None
        return obj

    # -- constructors -----------------------------------------------------------
    @classmethod
    def zero(cls, prime: int, gamma: ExponentGroup | None = None) -> "NovikovScalar":
        return cls._make(prime, gamma or _TRIVIAL, ())

    @classmethod
    def one(cls, prime: int, gamma: ExponentGroup | None = None) -> "NovikovScalar":
        return cls._make(prime, gamma or _TRIVIAL, ((_ZERO, CyclotomicRational.one(prime)),))

    @classmethod
    def constant(cls, value, prime: int | None = None, gamma: ExponentGroup | None = None) -> "NovikovScalar":
        if isinstance(value, CyclotomicRational):
            prime = value.prime
        elif prime is None:
            raise PreconditionError("prime required for rational constants")
        else:
            value = CyclotomicRational.rational(prime, value)
        if not value:
            return cls._make(prime, gamma or _TRIVIAL, ())
        return cls._make(prime, gamma or _TRIVIAL, ((_ZERO, value),))

    @classmethod
    def monomial(cls, coeff, exponent: Rational, prime: int | None = None, gamma: ExponentGroup | None = None):
        if not isinstance(coeff, CyclotomicRational):
            if prime is None:
                raise PreconditionError("prime required for rational coefficients")
            coeff = CyclotomicRational.rational(prime, coeff)
        return cls(coeff.prime, [(exponent, coeff)], gamma)

    @classmethod
    def t(cls, exponent: Rational, prime: int, gamma: ExponentGroup | None = None) -> "NovikovScalar":
        return cls.monomial(CyclotomicRational.one(prime), exponent, gamma=gamma)

    @classmethod
    def xi(cls, prime: int, power: int = 1, gamma: ExponentGroup | None = None) -> "NovikovScalar":
        return cls.constant(CyclotomicRational.xi(prime, power), gamma=gamma)

    # -- basic queries ------------------------------------------------------------
    @property
    def valuation(self):
        return self.terms[0][0] if self.terms else INF

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_exact(self) -> bool:
        return self.truncation is None

    def leading_coefficient(self) -> CyclotomicRational:
        if not self.terms:
            raise DomainError("zero scalar has no leading coefficient")
        return self.terms[0][1]

    def coefficient(self, exponent: Rational) -> CyclotomicRational:
        e = parse_rational(exponent)
        for ex, c in self.terms:
            if ex == e:
                return c
        return CyclotomicRational.zero(self.prime)

    def leading_term(self) -> "NovikovScalar":
        if not self.terms:
            raise DomainError("zero scalar has no leading term")
        return NovikovScalar._make(self.prime, self.gamma, self.terms[:1])

    def truncate(self, order: Rational) -> "NovikovScalar":
        order = parse_rational(order)
        trunc = _min_trunc(self.truncation, order)
        return NovikovScalar._make(self.prime, self.gamma, tuple(t for t in self.terms if t[0] < trunc), trunc)

    def shift(self, exponent: Rational) -> "NovikovScalar":
        """Multiply by ``t^exponent``."""
        e = parse_rational(exponent)
        if not self.gamma.contains(e):
            raise ConfigurationError(f"exponent {e} is not in the exponent group")
        trunc = None if self.truncation is None else self.truncation + e
        return NovikovScalar._make(self.prime, self.gamma, tuple((x + e, c) for x, c in self.terms), trunc)

    # -- arithmetic ---------------------------------------------------------------
    def _coerce(self, other) -> "NovikovScalar":
        if isinstance(other, NovikovScalar):
            if other.prime != self.prime or other.gamma != self.gamma:
                raise ConfigurationError("operands have different fields or exponent groups")
            return other
        if isinstance(other, CyclotomicRational):
            if other.prime != self.prime:
                raise ConfigurationError("mismatched primes")
            return NovikovScalar.constant(other, gamma=self.gamma)
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return NovikovScalar.constant(other, self.prime, self.gamma)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        trunc = _min_trunc(self.truncation, other.truncation)
        a, b = self.terms, other.terms
        if trunc is None and len(a) == 1 and len(b) == 1 and a[0][0] == b[0][0]:
            c = a[0][1] + b[0][1]
            return NovikovScalar._make(self.prime, self.gamma, ((a[0][0], c),) if c else ())
        acc = dict(a)
        for e, c in b:
            if e in acc:
                acc[e] = acc[e] + c
            else:
                acc[e] = c
        items = tuple(sorted((e, c) for e, c in acc.items() if c and (trunc is None or e < trunc)))
        return NovikovScalar._make(self.prime, self.gamma, items, trunc)

    __radd__ = __add__

    def __neg__(self):
        return NovikovScalar._make(self.prime, self.gamma, tuple((e, -c) for e, c in self.terms), self.truncation)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if not other:
                return NovikovScalar._make(self.prime, self.gamma, (), self.truncation)
            return NovikovScalar._make(
                self.prime, self.gamma, tuple((e, c * other) for e, c in self.terms), self.truncation
            )
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.terms, other.terms
        ta, tb = self.truncation, other.truncation
        if ta is None and tb is None:
            trunc = None
        else:
            ta_ = INF if ta is None else ta
            tb_ = INF if tb is None else tb
            bound = min(ta_ + other.valuation, tb_ + self.valuation)
            trunc = None if bound == INF else bound
        if trunc is None and len(a) == 1 and len(b) == 1:
            return NovikovScalar._make(self.prime, self.gamma, ((a[0][0] + b[0][0], a[0][1] * b[0][1]),))
        acc: dict = {}
        for e1, c1 in a:
            for e2, c2 in b:
                e = e1 + e2
                if trunc is not None and e >= trunc:
                    continue
                prod = c1 * c2
                acc[e] = acc[e] + prod if e in acc else prod
        items = tuple(sorted((e, c) for e, c in acc.items() if c))
        return NovikovScalar._make(self.prime, self.gamma, items, trunc)

    __rmul__ = __mul__

    def inverse(self) -> "NovikovScalar":
        """Exact inverse; defined only for monomials (always the case when Gamma is trivial)."""
        if not self.terms:
            raise DomainError("zero has no inverse")
        if len(self.terms) != 1 or self.truncation is not None:
            raise DomainError("exact inverse needs an untruncated monomial; use invert(a, order)")
        e, c = self.terms[0]
        return NovikovScalar._make(self.prime, self.gamma, ((-e, c.inverse()),))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = NovikovScalar.one(self.prime, self.gamma)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparison and display ------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, NovikovScalar):
            return (
                self.prime == other.prime
                and self.gamma == other.gamma
                and self.terms == other.terms
                and self.truncation == other.truncation
            )
        if isinstance(other, (int, Fraction, CyclotomicRational)) and not isinstance(other, bool):
            if self.truncation is not None:
                return False
            if not other:
                return not self.terms
            return len(self.terms) == 1 and self.terms[0][0] == 0 and self.terms[0][1] == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.prime, self.gamma.step, self.terms, self.truncation))
        return self._hash

    def __str__(self):
        if not self.terms:
            body = "0"
        else:
            parts = []
            for e, c in self.terms:
                cs = str(c)
                if " " in cs:
                    cs = f"({cs})"
                parts.append(cs if e == 0 else f"{cs}*t^{e}")
            body = " + ".join(parts)
        if self.truncation is not None:
            body += f" + O(t^{self.truncation})"
        return body

    def __repr__(self):
        return f"NovikovScalar({self})"

    def to_json(self) -> dict:
        return {
            "terms": [[e.numerator, e.denominator, c.to_json()] for e, c in self.terms],
            "truncation": None if self.truncation is None else [self.truncation.numerator, self.truncation.denominator],
        }

    @classmethod
    def from_json(cls, data: dict, prime: int, gamma: ExponentGroup | None = None) -> "NovikovScalar":
        terms = [(Fraction(int(n), int(d)), CyclotomicRational.from_json(prime, c)) for n, d, c in data["terms"]]
        trunc = data.get("truncation")
        trunc = None if trunc is None else Fraction(int(trunc[0]), int(trunc[1]))
        return cls(prime, terms, gamma, trunc)


def as_scalar(value, prime: int, gamma: ExponentGroup | None = None) -> NovikovScalar:
    """Lift ints, Fractions and cyclotomic values to ``NovikovScalar``."""
    if isinstance(value, NovikovScalar):
        return value
    if isinstance(value, CyclotomicRational):
        return NovikovScalar.constant(value, gamma=gamma)
    return NovikovScalar.constant(parse_rational(value), prime, gamma)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def field_arith(a: NovikovScalar, b: NovikovScalar, op: str) -> NovikovScalar:
    if a.prime != b.prime or a.gamma != b.gamma:
        raise ConfigurationError("operands have different fields or exponent groups")
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def valuation(a: NovikovScalar):
    return a.valuation


def invert(a: NovikovScalar, order: Rational | None = None) -> NovikovScalar:
    """Inverse of ``a``, exact for monomials, otherwise a geometric series cut at ``order``."""
    if a.is_zero():
        raise DomainError("zero has no inverse")
    if a.is_monomial() and a.truncation is None:
        return a.inverse()
    if order is None:
        raise PreconditionError("a truncation order is required for non-monomial inverses")
    order = parse_rational(order)
    lead_inv = a.leading_term().inverse()
    v = a.valuation
    # a = lead * (1 + u) with nu(u) > 0
    u = (a * lead_inv) - 1
    inner_order = order + v
    if a.truncation is not None:
        inner_order = min(inner_order, a.truncation - v)
    neg_u = (-u).truncate(inner_order)
    total = NovikovScalar.one(a.prime, a.gamma).truncate(inner_order)
    power = total
    while True:
        power = (power * neg_u).truncate(inner_order)
        if power.is_zero():
            break
        total = total + power
    result = total * lead_inv
    trunc = order
    if a.truncation is not None:
        trunc = min(trunc, a.truncation - 2 * v)
    return result.truncate(trunc)


@dataclass(frozen=True)
class Unsolvable:
    """Marker returned when ``x^p = xi^q + h(x)`` has no solution in the Novikov field."""

    prime: int
    target_power: int
    reason: str

    def __bool__(self) -> bool:
        return False


def _poly_eval(coeffs: Sequence[NovikovScalar], x: NovikovScalar, order: Fraction) -> NovikovScalar:
    result = NovikovScalar.zero(x.prime, x.gamma)
    for c in reversed(coeffs):
        result = (result * x + c).truncate(order)
    return result


def solve_perturbed_unity_root(
    h: Sequence[NovikovScalar],
    target_power: int = 0,
    order: Rational = 1,
    branch: int = 0,
    prime: int | None = None,
    gamma: ExponentGroup | None = None,
):
    """Solve ``x^p = xi^q + h(x)`` exponent by exponent.

    ``h`` lists the coefficients ``h_0, ..., h_d`` (``d < p``), each of strictly
    positive valuation.  For ``q = 0`` the branch whose zero-level term is
    ``xi^branch`` is returned, truncated at ``order``.  For ``p`` not dividing
    ``q`` the zero-level equation ``a^p = xi^q`` already fails in ``Q(xi_p)``
    and an :class:`Unsolvable` marker is returned.
    """
    h = list(h)
    if h:
        prime = h[0].prime
        gamma = h[0].gamma
    if prime is None:
        raise PreconditionError("prime is required when h is empty")
    gamma = gamma or _TRIVIAL
    p = prime
    if len(h) > p:
        raise PreconditionError("h must have degree < p")
    for c in h:
        if c.prime != p or c.gamma != gamma:
            raise ConfigurationError("coefficients of h must share the field")
        if not c.is_zero() and c.valuation <= 0:
            raise PreconditionError("every coefficient of h needs strictly positive valuation")
    order = parse_rational(order)
    target = CyclotomicRational.xi(p, target_power)
    # zero level: a0^p = xi^q; any solution is a root of unity, and the roots
    # of unity of Q(xi_p) are exactly +-xi^j, so this search is complete.
    candidates = [z for z in roots_of_unity(p) if z ** p == target]
    if not candidates:
        return Unsolvable(p, target_power, f"x^{p} = xi^{target_power % p} has no root in Q(xi_{p})")
    a0 = CyclotomicRational.xi(p, branch) if target_power % p == 0 else candidates[0]
    if a0 ** p != target:
        raise PreconditionError("branch does not solve the zero-level equation")
    x = NovikovScalar.constant(a0, gamma=gamma)
    denom = (a0 ** (p - 1)) * p
    target_s = NovikovScalar.constant(target, gamma=gamma)
    limit = 10_000
    for _ in range(limit):
        residual = ((x ** p).truncate(order) - target_s - _poly_eval(h, x, order)).truncate(order)
        if residual.is_zero():
            return x.truncate(order)
        g, r = residual.terms[0]
        x = x - NovikovScalar.monomial(r / denom, g, gamma=gamma)
    raise DomainError("root iteration did not converge")
