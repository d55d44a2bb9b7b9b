"""Brute-force counts over (Z/p^n)^k that back the volume and fiber formulas.

Determinants here are evaluated by the Leibniz expansion on plain integer
arrays, deliberately independent of the elimination used in linalg.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ._enum import check_guard, chunk_bounds, inverse_table, residue_tuples, valuations
from .linalg import VolumeTable, det_level_volume, gl_volume

__all__ = [
    "ProjectivePoint",
    "MinorMapReport",
    "count_gl",
    "count_det_zero",
    "total_mass_ok",
    "normalize_rows",
    "count_det_level",
    "count_A",
    "count_B",
    "count_singular_2x2",
    "minor_fibers_3x2",
    "minor_fibers_4x3",
    "count_balls_cover",
    "projective_points",
    "projective_space_size",
    "formula_gl",
    "formula_det_level",
    "formula_A",
    "formula_B",
    "formula_singular_2x2",
    "fiber_formula_3x2",
    "fiber_formula_4x3",
]


# ---------------------------------------------------------------------------
# closed forms


def formula_gl(n, p, m) -> int:
    value = p ** (m * n * n) * gl_volume(n, VolumeTable(p))
    assert value.denominator == 1
    return int(value)


def formula_det_level(n, p, m, ell) -> int:
    value = p ** (m * n * n) * det_level_volume(n, ell, VolumeTable(p))
    assert value.denominator == 1
    return int(value)


def formula_A(k, p) -> int:
    return p ** (2 * k) - p ** (2 * k - 2)


def formula_B(k, p) -> int:
    return p ** (3 * k) + p ** (3 * k - 1) - p ** (3 * k - 2) - p ** (3 * k - 3)


def formula_singular_2x2(p, n) -> int:
    return p ** (3 * n) + p ** (3 * n - 1) - p ** (2 * n - 1)


def fiber_formula_3x2(p, n, m1) -> int:
    return p ** (4 * n - 3 - m1) * (p - 1) * (p + 1) * (p ** (m1 + 1) - 1)


def fiber_formula_4x3(p, n, m1) -> int:
    return p ** (9 * n - 6 - m1) * (p**3 - 1) * (p ** (m1 + 1) - 1) * (p ** (m1 + 2) - 1)


# ---------------------------------------------------------------------------
# brute force


def _leibniz_det(mats: np.ndarray, q: int) -> np.ndarray:
    n = mats.shape[1]
    total = np.zeros(mats.shape[0], dtype=np.int64)
    for perm in itertools.permutations(range(n)):
        sign = _perm_sign(perm)
        term = np.ones(mats.shape[0], dtype=np.int64)
        for i, j in enumerate(perm):
            term = term * mats[:, i, j] % q
        total = (total + sign * term) % q
    return total


def _perm_sign(perm) -> int:
    sign, seen = 1, set()
    for i in range(len(perm)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@lru_cache(maxsize=None)
def _det_level_histogram(n: int, p: int, m: int, guard: int | None) -> tuple:
    q = p**m
    total = q ** (n * n)
    check_guard(total, guard)
    hist = np.zeros(m + 1, dtype=np.int64)
    for lo, hi in chunk_bounds(total):
        mats = residue_tuples(q, n * n, lo, hi).reshape(-1, n, n)
        v = valuations(_leibniz_det(mats, q), p, m)
        hist += np.bincount(v, minlength=m + 1)
    return tuple(int(x) for x in hist)


def count_gl(n: int, p: int, m: int, guard: int | None = None) -> int:
    """Number of n x n matrices over Z/p^m that are invertible mod p."""
    return _det_level_histogram(n, p, m, guard)[0]


def count_det_level(n: int, p: int, m: int, ell: int, guard: int | None = None) -> int:
    """Number of n x n matrices over Z/p^m whose determinant has valuation exactly ell < m."""
    if not 0 <= ell < m:
        raise ValueError("need 0 <= ell < m")
    return _det_level_histogram(n, p, m, guard)[ell]


def count_det_zero(n: int, p: int, m: int, guard: int | None = None) -> int:
    return _det_level_histogram(n, p, m, guard)[m]


def _all_tuples(q, k, guard):
    check_guard(q**k, guard)
    return residue_tuples(q, k)


def _unit_rows(t: np.ndarray, p: int) -> np.ndarray:
    return (t % p != 0).any(axis=1)


def count_A(k: int, p: int, guard: int | None = None) -> int:
    """Unit triples mod p^k with k2^2 - k1 k3 = 0."""
    q = p**k
    t = _all_tuples(q, 3, guard)
    hit = (t[:, 1] * t[:, 1] - t[:, 0] * t[:, 2]) % q == 0
    return int((hit & _unit_rows(t, p)).sum())


def count_B(k: int, p: int, guard: int | None = None) -> int:
    """Unit quadruples mod p^k with k1 k4 - k2 k3 = 0."""
    q = p**k
    t = _all_tuples(q, 4, guard)
    hit = (t[:, 0] * t[:, 3] - t[:, 1] * t[:, 2]) % q == 0
    return int((hit & _unit_rows(t, p)).sum())


def count_singular_2x2(p: int, n: int, guard: int | None = None) -> int:
    q = p**n
    t = _all_tuples(q, 4, guard)
    return int(((t[:, 0] * t[:, 3] - t[:, 1] * t[:, 2]) % q == 0).sum())


# ---------------------------------------------------------------------------
# projective points over Z/p^n


@dataclass(frozen=True)
class ProjectivePoint:
    """A point of P^r(Z/p^n), stored in normal form.

    Normal form: the first coordinate of minimal valuation m equals p^m
    exactly.  For unit points this is the usual 'first unit coordinate is 1'.
    """

    p: int
    n: int
    coords: tuple

    @property
    def modulus(self) -> int:
        return self.p**self.n

    @classmethod
    def normalize(cls, coords, p: int, n: int) -> ProjectivePoint:
        arr = np.array([list(coords)], dtype=np.int64)
        norm, m1 = normalize_rows(arr, p, n)
        if norm.shape[0] == 0:
            raise ValueError("the zero vector is not a projective point")
        return cls(p, n, tuple(int(x) for x in norm[0]))

    @property
    def min_valuation(self) -> int:
        vals = valuations(np.array(self.coords, dtype=np.int64), self.p, self.n)
        return int(vals.min())

    @property
    def is_unit(self) -> bool:
        return any(c % self.p for c in self.coords)


def normalize_rows(k: np.ndarray, p: int, n: int):
    """Normal forms of the nonzero rows of k (mod p^n), plus their minimal valuations."""
    q = p**n
    k = np.asarray(k, dtype=np.int64) % q
    vals = valuations(k, p, n)
    m1 = vals.min(axis=1)
    keep = m1 < n
    k, vals, m1 = k[keep], vals[keep], m1[keep]
    first = np.argmax(vals == m1[:, None], axis=1)
    lead = k[np.arange(k.shape[0]), first]
    unit = lead // p**m1
    inv = inverse_table(q, p)[unit]
    return (inv[:, None] * k) % q, m1


def projective_points(dim: int, p: int, n: int, guard: int | None = None) -> set:
    q = p**n
    t = _all_tuples(q, dim + 1, guard)
    norm, _ = normalize_rows(t, p, n)
    return {ProjectivePoint(p, n, tuple(int(x) for x in row)) for row in np.unique(norm, axis=0)}


def projective_space_size(dim: int, p: int, n: int) -> int:
    r = dim + 1
    total = 0
    for j in range(1, n + 1):
        units = p ** (r * j) - p ** (r * (j - 1))
        total += units // (p ** (j - 1) * (p - 1))
    return total


# ---------------------------------------------------------------------------
# minor maps


@dataclass
class MinorMapReport:
    p: int
    n: int
    rows: int
    fiber_sizes: dict = field(default_factory=dict)  # ProjectivePoint -> int
    min_valuations: dict = field(default_factory=dict)  # ProjectivePoint -> m1
    domain_size: int = 0
    degenerate_size: int = 0  # full-rank matrices whose image lies on the quadric Q

    def formula(self, m1: int) -> int:
        if self.rows == 3:
            return fiber_formula_3x2(self.p, self.n, m1)
        return fiber_formula_4x3(self.p, self.n, m1)

    def mismatches(self) -> list:
        return [
            (pt, size, self.formula(self.min_valuations[pt]))
            for pt, size in self.fiber_sizes.items()
            if size != self.formula(self.min_valuations[pt])
        ]

    def sizes_by_m1(self) -> dict:
        out = {}
        for pt, size in self.fiber_sizes.items():
            out.setdefault(self.min_valuations[pt], set()).add(size)
        return out

    def depends_only_on_m1(self) -> bool:
        return all(len(s) == 1 for s in self.sizes_by_m1().values())

    def is_surjective(self) -> bool:
        return len(self.fiber_sizes) == projective_space_size(self.rows - 1, self.p, self.n)

    def mass_conserved(self) -> bool:
        return sum(self.fiber_sizes.values()) == self.domain_size

    def ok(self) -> bool:
        return not self.mismatches() and self.depends_only_on_m1() and self.is_surjective() and self.mass_conserved()


def _minors_3x2(t):
    x1, x2, x3, x4, x5, x6 = (t[:, i] for i in range(6))
    return np.stack([x1 * x5 - x2 * x4, x1 * x6 - x3 * x4, x2 * x6 - x3 * x5], axis=1)


def _minors_4x3(t, q):
    mats = t.reshape(-1, 4, 3)
    cols = []
    for drop in range(4):
        keep = [r for r in range(4) if r != drop]
        cols.append(_leibniz_det(mats[:, keep, :], q))
    return np.stack(cols, axis=1)


def _minor_fibers(rows: int, p: int, n: int, guard: int | None) -> MinorMapReport:
    q = p**n
    nvars = rows * (rows - 1)
    total = q**nvars
    check_guard(total, guard)
    report = MinorMapReport(p=p, n=n, rows=rows)
    counts = Counter()
    m1_of = {}
    for lo, hi in chunk_bounds(total):
        t = residue_tuples(q, nvars, lo, hi)
        k = (_minors_3x2(t) if rows == 3 else _minors_4x3(t, q)) % q
        norm, m1 = normalize_rows(k, p, n)
        if rows == 3:
            degenerate = (norm[:, 1] * norm[:, 1] - norm[:, 0] * norm[:, 2]) % q == 0
        else:
            degenerate = (norm[:, 0] * norm[:, 3] - norm[:, 1] * norm[:, 2]) % q == 0
        report.domain_size += norm.shape[0]
        report.degenerate_size += int(degenerate.sum())
        keys, cnt = np.unique(norm, axis=0, return_counts=True)
        key_m1 = valuations(keys, p, n).min(axis=1)
        for key, c, mv in zip(map(tuple, keys.tolist()), cnt.tolist(), key_m1.tolist()):
            counts[key] += c
            m1_of[key] = mv
    for key, c in counts.items():
        pt = ProjectivePoint(p, n, key)
        report.fiber_sizes[pt] = c
        report.min_valuations[pt] = m1_of[key]
    return report


def minor_fibers_3x2(p: int, n: int, guard: int | None = None) -> MinorMapReport:
    """Fibers of M -> [minors of M] over full-rank 3 x 2 matrices mod p^n.

    The entries x1..x6 fill the columns (x1, x2, x3) and (x4, x5, x6); the
    target point is [x1x5 - x2x4 : x1x6 - x3x4 : x2x6 - x3x5].  'Full rank'
    means the minors are not all zero mod p^n.
    """
    return _minor_fibers(3, p, n, guard)


def minor_fibers_4x3(p: int, n: int, guard: int | None = None) -> MinorMapReport:
    """Same as minor_fibers_3x2 for 4 x 3 matrices; coordinate i is the minor without row i."""
    return _minor_fibers(4, p, n, guard)


def count_balls_cover(U, p: int, m: int) -> int:
    """Size of the reduction of a finite residue set modulo p^m."""
    q = p**m
    seen = set()
    for u in U:
        if isinstance(u, (tuple, list, np.ndarray)):
            seen.add(tuple(int(x) % q for x in u))
        else:
            seen.add(int(u) % q)
    return len(seen)


def total_mass_ok(n: int, p: int, m: int, guard: int | None = None) -> bool:
    return sum(_det_level_histogram(n, p, m, guard)) == p ** (m * n * n)


