"""Reproducible uniform sampling of truncated p-adic integers and random polynomials.

Streams are counter-based (Philox keyed through a SeedSequence), so a
(seed, index, path) triple always yields the same draws no matter how work
is split across threads.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from math import comb

import numpy as np

from ._enum import residue_dtype
from .exceptions import LengthMismatch, NotInvertible
from .linalg import PadicMatrix
from .padic import PadicApprox, PadicContext

__all__ = [
    "SeededStream",
    "CoefficientAssignment",
    "monomials",
    "sample_uniform",
    "sample_residues",
    "sample_polynomial",
    "change_variables",
]


@dataclass(frozen=True)
class SeededStream:
    seed: int
    index: int = 0
    path: tuple = ()

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def child(self, j: int) -> SeededStream:
        return SeededStream(self.seed, self.index, self.path + (int(j),))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.index,) + self.path)
        return np.random.Generator(np.random.Philox(ss))


def sample_residues(ctx: PadicContext, stream: SeededStream, shape) -> np.ndarray:
    """Uniform residues mod p^m assembled from m independent base-p digits."""
    p, m, q = ctx.prime, ctx.precision, ctx.modulus
    shape = (shape,) if isinstance(shape, int) else tuple(shape)
    digits = stream.generator().integers(0, p, size=shape + (m,), dtype=np.int64)
    dtype = residue_dtype(q)
    if dtype is object:
        digits = digits.astype(object)
    weights = np.array([p**i for i in range(m)], dtype=dtype)
    return (digits * weights).sum(axis=-1)


def sample_uniform(ctx: PadicContext, stream: SeededStream) -> PadicApprox:
    return PadicApprox(ctx, int(sample_residues(ctx, stream, 1)[0]))


def monomials(d: int, nvars: int) -> list[tuple]:
    """Exponent vectors of total degree d in nvars variables, lexicographically descending."""
    if nvars == 1:
        return [(d,)]
    out = []
    for first in range(d, -1, -1):
        for rest in monomials(d - first, nvars - 1):
            out.append((first,) + rest)
    return out


@dataclass(frozen=True)
class CoefficientAssignment:
    """A homogeneous polynomial of degree d in n+1 variables with coefficients mod p^m."""

    ctx: PadicContext
    degree: int
    n: int
    values: dict

    def __post_init__(self):
        expected = comb(self.degree + self.n, self.degree)
        if len(self.values) != expected:
            raise LengthMismatch(f"expected {expected} coefficients, got {len(self.values)}")
        for alpha in self.values:
            if len(alpha) != self.n + 1 or sum(alpha) != self.degree or min(alpha) < 0:
                raise ValueError(f"bad exponent vector {alpha}")

    @classmethod
    def from_vector(cls, ctx, degree, n, coeffs) -> CoefficientAssignment:
        monos = monomials(degree, n + 1)
        if len(coeffs) != len(monos):
            raise LengthMismatch(f"expected {len(monos)} coefficients, got {len(coeffs)}")
        return cls(ctx, degree, n, {a: PadicApprox(ctx, int(c)) for a, c in zip(monos, coeffs)})

    @classmethod
    def from_dict(cls, ctx, degree, n, coeffs: dict) -> CoefficientAssignment:
        """Missing monomials are zero."""
        vals = {a: PadicApprox(ctx, 0) for a in monomials(degree, n + 1)}
        for a, c in coeffs.items():
            vals[tuple(a)] = PadicApprox(ctx, int(c))
        return cls(ctx, degree, n, vals)

    def vector(self) -> list[int]:
        return [self.values[a].residue for a in monomials(self.degree, self.n + 1)]

    def __len__(self):
        return len(self.values)

    def evaluate(self, x) -> int:
        q = self.ctx.modulus
        total = 0
        for alpha, c in self.values.items():
            term = c.residue
            for xi, e in zip(x, alpha):
                term = term * pow(int(xi), e, q) % q
            total += term
        return total % q


def sample_polynomial(d: int, n: int, ctx: PadicContext, stream: SeededStream) -> CoefficientAssignment:
    if d < 1 or n < 1:
        raise ValueError("need d >= 1 and n >= 1")
    count = comb(d + n, d)
    return CoefficientAssignment.from_vector(ctx, d, n, sample_residues(ctx, stream, count))


def _poly_mul(a: dict, b: dict, q: int) -> dict:
    out = defaultdict(int)
    for ea, ca in a.items():
        for eb, cb in b.items():
            out[tuple(x + y for x, y in zip(ea, eb))] += ca * cb
    return {e: c % q for e, c in out.items() if c % q}


def change_variables(c: CoefficientAssignment, g: PadicMatrix) -> CoefficientAssignment:
    """Coefficients of x -> f(g x)."""
    nv = c.n + 1
    if g.rows != nv or g.cols != nv:
        raise ValueError(f"g must be {nv}x{nv}")
    if g.ctx != c.ctx:
        raise ValueError("context mismatch")
    if not g.is_invertible():
        raise NotInvertible("change of variables must be invertible mod p")
    q = c.ctx.modulus
    rows = g.tolist()
    # linear forms (g x)_i
    forms = []
    for i in range(nv):
        form = {}
        for j in range(nv):
            if rows[i][j]:
                e = [0] * nv
                e[j] = 1
                form[tuple(e)] = rows[i][j]
        forms.append(form)
    one = {(0,) * nv: 1}
    power_cache = {}

    def form_power(i, e):
        key = (i, e)
        if key not in power_cache:
            power_cache[key] = one if e == 0 else _poly_mul(form_power(i, e - 1), forms[i], q)
        return power_cache[key]

    result = defaultdict(int)
    for alpha, coef in c.values.items():
        if coef.residue == 0:
            continue
        term = {(0,) * nv: coef.residue}
        for i, e in enumerate(alpha):
            if e:
                term = _poly_mul(term, form_power(i, e), q)
        for mono, v in term.items():
            result[mono] += v
    return CoefficientAssignment.from_dict(c.ctx, c.degree, c.n, {a: v % q for a, v in result.items()})
