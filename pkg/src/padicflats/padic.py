"""Truncated p-adic integers.

Elements of Z_p are handled through their reductions modulo p^m.  A zero
residue only tells us that the valuation is at least m, so absolute values
are returned as closed intervals of exact rationals rather than numbers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

from sympy import isprime

from .exceptions import NonUnitDenominator, NotInvertible, NotPrime

__all__ = [
    "PadicContext",
    "PadicApprox",
    "Valuation",
    "BracketedValue",
    "valuation",
    "abs_p",
    "padic_of_rational",
    "int_valuation",
    "rational_valuation",
]


@dataclass(frozen=True)
class PadicContext:
    """A prime together with the working precision m (arithmetic mod p^m)."""

    prime: int
    precision: int

    def __post_init__(self):
        if not isinstance(self.prime, int) or not isprime(self.prime):
            raise NotPrime(f"{self.prime!r} is not a prime")
        if not isinstance(self.precision, int) or self.precision < 1:
            raise ValueError(f"precision must be a positive integer, got {self.precision!r}")

    @property
    def modulus(self) -> int:
        return self.prime**self.precision

    def __call__(self, value) -> PadicApprox:
        if isinstance(value, Fraction):
            return padic_of_rational(value, self)
        return PadicApprox(self, value)

    def zero(self) -> PadicApprox:
        return PadicApprox(self, 0)

    def one(self) -> PadicApprox:
        return PadicApprox(self, 1)


@total_ordering
@dataclass(frozen=True)
class Valuation:
    """Either an exact valuation v < m or the censored value 'at least m'."""

    value: int
    censored: bool = False

    @classmethod
    def finite(cls, v: int) -> Valuation:
        return cls(v, False)

    @classmethod
    def at_least(cls, m: int) -> Valuation:
        return cls(m, True)

    @property
    def is_finite(self) -> bool:
        return not self.censored

    def _key(self):
        # AtLeast(m) sorts above every Finite(v), and Finite(v) always has v < m
        return (self.censored, self.value)

    def __lt__(self, other):
        if not isinstance(other, Valuation):
            return NotImplemented
        return self._key() < other._key()

    def __repr__(self):
        return f"AtLeast({self.value})" if self.censored else f"Finite({self.value})"


@dataclass(frozen=True)
class BracketedValue:
    """A closed interval [lo, hi] of exact nonnegative rationals."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        if not 0 <= lo <= hi:
            raise ValueError(f"invalid bracket [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x) -> BracketedValue:
        return cls(Fraction(x), Fraction(x))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        return self.lo <= Fraction(x) <= self.hi

    def scale(self, factor) -> BracketedValue:
        factor = Fraction(factor)
        if factor < 0:
            raise ValueError("brackets may only be scaled by nonnegative factors")
        return BracketedValue(self.lo * factor, self.hi * factor)

    def __add__(self, other):
        if not isinstance(other, BracketedValue):
            return NotImplemented
        return BracketedValue(self.lo + other.lo, self.hi + other.hi)

    def __mul__(self, other):
        if isinstance(other, BracketedValue):
            return BracketedValue(self.lo * other.lo, self.hi * other.hi)
        return self.scale(other)

    __rmul__ = __mul__

    def __str__(self):
        return f"[{self.lo}, {self.hi}]"


@dataclass(frozen=True)
class PadicApprox:
    """The residue of a p-adic integer modulo p^m."""

    ctx: PadicContext
    residue: int

    def __post_init__(self):
        object.__setattr__(self, "residue", int(self.residue) % self.ctx.modulus)

    def _coerce(self, other) -> int:
        if isinstance(other, PadicApprox):
            if other.ctx != self.ctx:
                raise ValueError("cannot mix p-adic approximations from different contexts")
            return other.residue
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        r = self._coerce(other)
        if r is NotImplemented:
            return r
        return PadicApprox(self.ctx, self.residue + r)

    __radd__ = __add__

    def __sub__(self, other):
        r = self._coerce(other)
        if r is NotImplemented:
            return r
        return PadicApprox(self.ctx, self.residue - r)

    def __rsub__(self, other):
        r = self._coerce(other)
        if r is NotImplemented:
            return r
        return PadicApprox(self.ctx, r - self.residue)

    def __mul__(self, other):
        r = self._coerce(other)
        if r is NotImplemented:
            return r
        return PadicApprox(self.ctx, self.residue * r)

    __rmul__ = __mul__

    def __neg__(self):
        return PadicApprox(self.ctx, -self.residue)

    def __pow__(self, e: int):
        return PadicApprox(self.ctx, pow(self.residue, e, self.ctx.modulus))

    def __int__(self):
        return self.residue

    def is_unit(self) -> bool:
        return self.residue % self.ctx.prime != 0

    def inverse(self) -> PadicApprox:
        if not self.is_unit():
            raise NotInvertible(f"{self.residue} is not a unit mod {self.ctx.prime}")
        return PadicApprox(self.ctx, pow(self.residue, -1, self.ctx.modulus))

    def valuation(self) -> Valuation:
        return valuation(self)

    def abs_p(self) -> BracketedValue:
        return abs_p(self)

    def reduce(self, precision: int) -> PadicApprox:
        """Project to a coarser precision."""
        if precision > self.ctx.precision:
            raise ValueError("cannot increase precision of a truncation")
        return PadicApprox(PadicContext(self.ctx.prime, precision), self.residue)

    def __repr__(self):
        return f"PadicApprox({self.residue} mod {self.ctx.prime}^{self.ctx.precision})"


def int_valuation(x: int, p: int, cap: int | None = None) -> int:
    """v_p of a nonzero integer, optionally capped (x == 0 returns cap)."""
    if x == 0:
        if cap is None:
            raise ValueError("valuation of 0 is infinite")
        return cap
    v = 0
    while x % p == 0:
        x //= p
        v += 1
        if cap is not None and v >= cap:
            return cap
    return v


def rational_valuation(q: Fraction, p: int) -> int:
    q = Fraction(q)
    if q == 0:
        raise ValueError("valuation of 0 is infinite")
    return int_valuation(q.numerator, p) - int_valuation(q.denominator, p)


def valuation(x: PadicApprox) -> Valuation:
    m = x.ctx.precision
    if x.residue == 0:
        return Valuation.at_least(m)
    return Valuation.finite(int_valuation(x.residue, x.ctx.prime))


def abs_p(x: PadicApprox) -> BracketedValue:
    v = valuation(x)
    p = x.ctx.prime
    if v.censored:
        return BracketedValue(Fraction(0), Fraction(1, p**v.value))
    return BracketedValue.point(Fraction(1, p**v.value))


def padic_of_rational(q, ctx: PadicContext) -> PadicApprox:
    """Image of a p-integral rational in Z/p^m."""
    q = Fraction(q)
    if q.denominator % ctx.prime == 0:
        raise NonUnitDenominator(f"{q} is not a p-adic integer for p={ctx.prime}")
    mod = ctx.modulus
    return PadicApprox(ctx, q.numerator * pow(q.denominator, -1, mod))
