"""Normalized Riemann sums of polynomial integrands over Z_p^k.

The level-n partial is p^{-kn} times the sum of f over the box
{0, ..., p^n - 1}^k, kept as an exact rational.  Its p-adic limit (when it
exists) is the Volkenborn integral of f.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from ._enum import CHUNK, check_guard, chunk_bounds, residue_tuples
from .exceptions import NonUnitDenominator
from .padic import PadicContext, rational_valuation

__all__ = [
    "PolynomialIntegrand",
    "VolkenbornPartial",
    "volkenborn_partial",
    "padic_limit_check",
    "convergence_valuations",
    "cubic_det_integrand",
    "cubic_det_closed_form",
]


@dataclass(frozen=True)
class PolynomialIntegrand:
    variables: int
    terms: tuple  # ((coefficient, exponent tuple), ...)

    def __post_init__(self):
        terms = []
        for coef, exps in self.terms:
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.variables or min(exps, default=0) < 0:
                raise ValueError(f"bad exponent vector {exps} for {self.variables} variables")
            terms.append((Fraction(coef), exps))
        object.__setattr__(self, "terms", tuple(terms))

    @classmethod
    def constant(cls, c, variables: int = 1) -> PolynomialIntegrand:
        return cls(variables, ((c, (0,) * variables),))

    @property
    def degree(self) -> int:
        return max((sum(e) for _, e in self.terms), default=0)

    def __call__(self, *x):
        return sum(c * _monomial(x, e) for c, e in self.terms)

    def __str__(self):
        parts = []
        for c, e in self.terms:
            mono = "*".join(f"x{i + 1}^{a}" if a > 1 else f"x{i + 1}" for i, a in enumerate(e) if a)
            parts.append(f"{c}*{mono}" if mono else str(c))
        return " + ".join(parts) or "0"


def _monomial(x, e):
    out = 1
    for xi, a in zip(x, e):
        if a:
            out = out * xi**a
    return out


def _poly(terms):
    return {tuple(e): c for c, e in terms}


def _mul(a, b):
    out = defaultdict(int)
    for ea, ca in a.items():
        for eb, cb in b.items():
            out[tuple(x + y for x, y in zip(ea, eb))] += ca * cb
    return out


def cubic_det_integrand() -> PolynomialIntegrand:
    """(x1 x6 - x3 x4)^2 - (x1 x5 - x2 x4)(x2 x6 - x3 x5), expanded."""

    def e(*idx):
        v = [0] * 6
        for i in idx:
            v[i - 1] += 1
        return tuple(v)

    a = {e(1, 6): 1, e(3, 4): -1}
    b = {e(1, 5): 1, e(2, 4): -1}
    c = {e(2, 6): 1, e(3, 5): -1}
    total = defaultdict(int, _mul(a, a))
    for mono, coef in _mul(b, c).items():
        total[mono] -= coef
    return PolynomialIntegrand(6, tuple((c, m) for m, c in sorted(total.items(), reverse=True) if c))


def cubic_det_closed_form(p: int, n: int) -> Fraction:
    """Raw box sum of the cubic determinant polynomial at level n."""
    x = p**n
    return Fraction(p ** (6 * n) * (x - 1) ** 2 * (5 * x * x + x - 4), 36)


@dataclass(frozen=True)
class VolkenbornPartial:
    p: int
    level: int
    raw_sum: Fraction
    normalized_sum: Fraction


def volkenborn_partial(
    f: PolynomialIntegrand, p: int, n: int, guard: int | None = None, method: str = "enumerate"
) -> VolkenbornPartial:
    """Level-n partial sum.

    method="enumerate" evaluates f at every point of the box (guarded);
    method="power_sums" factors each monomial's box sum into one-variable
    power sums and needs no enumeration.
    """
    k = f.variables
    N = p**n
    if method == "enumerate":
        check_guard(N**k, guard)
        raw = _enumerate_sum(f, N)
    elif method == "power_sums":
        raw = _power_sum(f, N)
    else:
        raise ValueError(f"unknown method {method!r}")
    return VolkenbornPartial(p, n, raw, raw / Fraction(p) ** (k * n))


def _enumerate_sum(f: PolynomialIntegrand, N: int) -> Fraction:
    k = f.variables
    den = lcm(*(c.denominator for c, _ in f.terms)) if f.terms else 1
    coefs = [int(c * den) for c, _ in f.terms]
    bound = sum(abs(c) for c in coefs) * max(N - 1, 1) ** f.degree * CHUNK
    dtype = np.int64 if bound < 2**62 else object
    total = 0
    for lo, hi in chunk_bounds(N**k):
        pts = residue_tuples(N, k, lo, hi).astype(dtype)
        vals = np.zeros(pts.shape[0], dtype=dtype)
        for c, (_, exps) in zip(coefs, f.terms):
            term = np.full(pts.shape[0], c, dtype=dtype)
            for i, a in enumerate(exps):
                if a:
                    term = term * pts[:, i] ** a
            vals = vals + term
        total += int(vals.sum())
    return Fraction(total, den)


def _power_sum(f: PolynomialIntegrand, N: int) -> Fraction:
    cache = {}

    def s(a):
        if a not in cache:
            cache[a] = sum(x**a for x in range(N))
        return cache[a]

    total = Fraction(0)
    for c, exps in f.terms:
        term = c
        for a in exps:
            term *= s(a)
        total += term
    return total


def convergence_valuations(partials, target, p) -> list:
    """v_p(partial_n - target) per level, None where they agree exactly."""
    p = p.prime if isinstance(p, PadicContext) else int(p)
    target = Fraction(target)
    out = []
    for part in partials:
        diff = part.normalized_sum - target
        out.append(None if diff == 0 else rational_valuation(diff, p))
    return out


def padic_limit_check(partials, target, ctx, slack: int = 0) -> bool:
    """True iff |partial_n - target|_p <= p^-(n - slack) at every supplied level."""
    p = ctx.prime if isinstance(ctx, PadicContext) else int(ctx)
    target = Fraction(target)
    if target.denominator % p == 0:
        raise NonUnitDenominator(f"target {target} is not p-integral for p={p}")
    vals = convergence_valuations(partials, target, p)
    return all(v is None or v >= part.level - slack for v, part in zip(vals, partials))
