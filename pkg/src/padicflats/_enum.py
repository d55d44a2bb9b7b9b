"""Odometer enumeration of residue tuples and vectorized residue helpers."""

from __future__ import annotations

import os
from functools import lru_cache

import numpy as np

from .exceptions import TooLarge

GUARD_ENV = "PADICFLATS_GUARD"
DEFAULT_GUARD = 10**8
CHUNK = 1 << 16

# products of two residues must fit in int64
INT64_SAFE_MODULUS = 3_037_000_499


def default_guard() -> int:
    value = os.environ.get(GUARD_ENV)
    return int(value) if value else DEFAULT_GUARD


def check_guard(size: int, guard: int | None = None) -> None:
    guard = default_guard() if guard is None else guard
    if size > guard:
        raise TooLarge(size, guard)


def residue_dtype(modulus: int):
    return np.int64 if modulus <= INT64_SAFE_MODULUS else object


def residue_tuples(q: int, k: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Rows are the tuples with odometer index in [start, stop); last coordinate runs fastest."""
    total = q**k
    stop = total if stop is None else min(stop, total)
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((idx.size, k), dtype=np.int64)
    for j in range(k - 1, -1, -1):
        out[:, j] = idx % q
        idx //= q
    return out


def iter_residue_tuples(q: int, k: int, chunk: int = CHUNK):
    total = q**k
    for start in range(0, total, chunk):
        yield residue_tuples(q, k, start, start + chunk)


def chunk_bounds(total: int, chunk: int = CHUNK):
    return [(s, min(s + chunk, total)) for s in range(0, total, chunk)]


def valuations(x: np.ndarray, p: int, cap: int) -> np.ndarray:
    """Elementwise v_p, with zero entries (and anything past the cap) mapped to cap."""
    x = np.asarray(x)
    v = np.zeros(x.shape, dtype=np.int64)
    y = x.copy()
    active = y != 0
    for _ in range(cap):
        hit = active & (y % p == 0)
        if not hit.any():
            break
        v += hit
        y = np.where(hit, y // p, y)
        active = hit
    v[x == 0] = cap
    return np.minimum(v, cap)


@lru_cache(maxsize=64)
def inverse_table(q: int, p: int) -> np.ndarray:
    """inv[u] = u^{-1} mod q for units u, 0 elsewhere.  Treat the result as read-only."""
    inv = np.zeros(q, dtype=np.int64)
    for u in range(q):
        if u % p:
            inv[u] = pow(u, -1, q)
    return inv
