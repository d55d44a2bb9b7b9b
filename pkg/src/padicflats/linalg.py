"""Linear algebra over Z/p^m and Haar volumes of matrix sets.

All elimination here pivots on an entry of minimal valuation in the
remaining block.  Every other entry of that block is then divisible by the
pivot's power of p, which is what makes row and column clearing exact
modulo p^m without ever dividing by a non-unit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._enum import residue_dtype, valuations
from .exceptions import LengthMismatch, NotSquare, SingularAtPrecision
from .padic import PadicApprox, PadicContext, int_valuation

__all__ = [
    "PadicMatrix",
    "SmithDecomposition",
    "VolumeTable",
    "det_residue",
    "smith_decompose",
    "gl_volume",
    "det_level_volume",
    "grassmannian_volume",
    "det_valuation_batch",
]


@dataclass(frozen=True)
class PadicMatrix:
    ctx: PadicContext
    rows: int
    cols: int
    data: tuple  # row-major residues

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("matrix dimensions must be positive")
        if len(self.data) != self.rows * self.cols:
            raise LengthMismatch(f"expected {self.rows * self.cols} entries, got {len(self.data)}")
        q = self.ctx.modulus
        object.__setattr__(self, "data", tuple(int(x) % q for x in self.data))

    @classmethod
    def from_rows(cls, ctx: PadicContext, rows) -> PadicMatrix:
        rows = [[int(x) for x in r] for r in rows]
        if len({len(r) for r in rows}) != 1:
            raise LengthMismatch("ragged rows")
        return cls(ctx, len(rows), len(rows[0]), tuple(x for r in rows for x in r))

    @classmethod
    def identity(cls, ctx: PadicContext, n: int) -> PadicMatrix:
        return cls(ctx, n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def diagonal(cls, ctx: PadicContext, diag) -> PadicMatrix:
        n = len(diag)
        return cls(ctx, n, n, tuple(diag[i] if i == j else 0 for i in range(n) for j in range(n)))

    @property
    def entries(self) -> list[PadicApprox]:
        return [PadicApprox(self.ctx, x) for x in self.data]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij) -> PadicApprox:
        i, j = ij
        return PadicApprox(self.ctx, self.data[i * self.cols + j])

    def tolist(self) -> list[list[int]]:
        c = self.cols
        return [list(self.data[i * c:(i + 1) * c]) for i in range(self.rows)]

    def __matmul__(self, other: PadicMatrix) -> PadicMatrix:
        if self.ctx != other.ctx or self.cols != other.rows:
            raise ValueError("incompatible matrices")
        a, b = self.tolist(), other.tolist()
        q = self.ctx.modulus
        out = [
            [sum(a[i][t] * b[t][j] for t in range(self.cols)) % q for j in range(other.cols)]
            for i in range(self.rows)
        ]
        return PadicMatrix.from_rows(self.ctx, out)

    def is_invertible(self) -> bool:
        """Invertible over Z/p^m, i.e. invertible mod p."""
        return self.is_square and det_residue(self).residue % self.ctx.prime != 0


def det_residue(M: PadicMatrix) -> PadicApprox:
    """det(M) mod p^m by valuation-pivoted elimination."""
    if not M.is_square:
        raise NotSquare(f"{M.rows}x{M.cols} matrix has no determinant")
    p, q, m = M.ctx.prime, M.ctx.modulus, M.ctx.precision
    a = M.tolist()
    n = M.rows
    det = 1
    for t in range(n):
        best = None
        for i in range(t, n):
            for j in range(t, n):
                if a[i][j]:
                    v = int_valuation(a[i][j], p, m)
                    if best is None or v < best[0]:
                        best = (v, i, j)
        if best is None:
            return PadicApprox(M.ctx, 0)
        v, i, j = best
        if i != t:
            a[t], a[i] = a[i], a[t]
            det = -det
        if j != t:
            for r in a:
                r[t], r[j] = r[j], r[t]
            det = -det
        pivot = a[t][t]
        unit = pivot // p**v
        inv = pow(unit, -1, q)
        det = det * pivot % q
        for i in range(t + 1, n):
            if a[i][t]:
                c = (a[i][t] // p**v) * inv % q
                a[i] = [(x - c * y) % q for x, y in zip(a[i], a[t])]
    return PadicApprox(M.ctx, det)


@dataclass(frozen=True)
class SmithDecomposition:
    """M = left . diag(p^u_1, ..., p^u_k) . right with left, right invertible mod p."""

    u_exponents: tuple
    left: PadicMatrix
    right: PadicMatrix

    @property
    def diagonal(self) -> PadicMatrix:
        p = self.left.ctx.prime
        return PadicMatrix.diagonal(self.left.ctx, [p**u for u in self.u_exponents])

    def reconstruct(self) -> PadicMatrix:
        return self.left @ self.diagonal @ self.right


def smith_decompose(M: PadicMatrix) -> SmithDecomposition:
    """Exponents u_1 <= ... <= u_n with M = left . diag(p^u) . right mod p^m.

    Each exponent is below m.  When the elimination runs out of nonzero
    pivots the remaining exponents are not determined by the truncation and
    SingularAtPrecision is raised.  The exponents sum to v_p(det M) whenever
    det M is nonzero mod p^m.
    """
    if not M.is_square:
        raise NotSquare(f"{M.rows}x{M.cols} matrix")
    ctx = M.ctx
    p, q, m = ctx.prime, ctx.modulus, ctx.precision
    n = M.rows
    a = M.tolist()
    # invariant: M == L . a . R (mod q)
    L = [[int(i == j) for j in range(n)] for i in range(n)]
    R = [[int(i == j) for j in range(n)] for i in range(n)]
    exps = []
    for t in range(n):
        best = None
        for i in range(t, n):
            for j in range(t, n):
                if a[i][j]:
                    v = int_valuation(a[i][j], p, m)
                    if best is None or v < best[0]:
                        best = (v, i, j)
        if best is None:
            raise SingularAtPrecision("determinant vanishes mod p^m")
        v, i, j = best
        if i != t:
            a[t], a[i] = a[i], a[t]
            for r in L:
                r[t], r[i] = r[i], r[t]
        if j != t:
            for r in a:
                r[t], r[j] = r[j], r[t]
            R[t], R[j] = R[j], R[t]
        pv = p**v
        unit = a[t][t] // pv
        inv = pow(unit, -1, q)
        # row t *= unit^-1, compensated by column t of L *= unit
        a[t] = [x * inv % q for x in a[t]]
        for r in L:
            r[t] = r[t] * unit % q
        for i in range(t + 1, n):
            c = a[i][t] // pv
            if c:
                a[i] = [(x - c * y) % q for x, y in zip(a[i], a[t])]
                for r in L:
                    r[t] = (r[t] + c * r[i]) % q
        for j in range(t + 1, n):
            c = a[t][j] // pv
            if c:
                for r in a:
                    r[j] = (r[j] - c * r[t]) % q
                R[t] = [(x + c * y) % q for x, y in zip(R[t], R[j])]
        exps.append(v)
    return SmithDecomposition(
        tuple(exps), PadicMatrix.from_rows(ctx, L), PadicMatrix.from_rows(ctx, R)
    )


@dataclass
class VolumeTable:
    """Cached products Pi_k = (1 - 1/p) ... (1 - 1/p^k)."""

    prime: int
    pi: list = field(default_factory=lambda: [Fraction(1)])

    def __getitem__(self, k: int) -> Fraction:
        if k < 0:
            raise ValueError("Pi_k needs k >= 0")
        while len(self.pi) <= k:
            j = len(self.pi)
            self.pi.append(self.pi[-1] * (1 - Fraction(1, self.prime**j)))
        return self.pi[k]


def _table(table) -> VolumeTable:
    return table if isinstance(table, VolumeTable) else VolumeTable(int(table))


def gl_volume(n: int, table) -> Fraction:
    """Haar measure of GL_n(Z_p) inside Z_p^{n x n}."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return _table(table)[n]


def det_level_volume(n: int, ell: int, table) -> Fraction:
    """Haar measure of {M in Z_p^{n x n} : |det M|_p = p^-ell}."""
    if n < 1 or ell < 0:
        raise ValueError("need n >= 1 and ell >= 0")
    t = _table(table)
    return t[n] * Fraction(1, t.prime**ell) * t[n + ell - 1] / (t[ell] * t[n - 1])


def grassmannian_volume(k: int, n: int, table) -> Fraction:
    """Total mass of the k-flats of projective n-space."""
    if not 0 <= k < n:
        raise ValueError("need 0 <= k < n")
    t = _table(table)
    return t[n + 1] / (t[k + 1] * t[n - k])


def det_valuation_batch(mats: np.ndarray, p: int, m: int) -> np.ndarray:
    """v_p(det) for a stack of square residue matrices, with m meaning det = 0 mod p^m.

    Rows are cleared by u*row_j - (a_j/p^v)*row_t; multiplying by the pivot's
    unit part u changes the determinant only by a unit, so the valuation is
    preserved without computing inverses.
    """
    q = p**m
    if residue_dtype(q) is np.int64:
        return _det_valuation_core(mats, p, m)
    # v_p(det mod p^m0) = min(v_p(det), m0), so only the rows censored at a
    # machine-word precision m0 need the slow object-dtype pass
    m0 = 0
    while residue_dtype(p ** (m0 + 1)) is np.int64:
        m0 += 1
    if m0 == 0:
        return _det_valuation_core(mats, p, m)
    mats = np.asarray(mats)
    low = (np.array(mats, dtype=object) % p**m0).astype(np.int64)
    out = _det_valuation_core(low, p, m0)
    redo = out == m0
    if redo.any():
        out[redo] = _det_valuation_core(mats[redo], p, m)
    return out


def _det_valuation_core(mats, p: int, m: int) -> np.ndarray:
    q = p**m
    dtype = residue_dtype(q)
    a = np.array(mats, dtype=dtype) % q
    if a.ndim != 3 or a.shape[1] != a.shape[2]:
        raise NotSquare(f"expected a (batch, n, n) stack, got shape {a.shape}")
    B, n, _ = a.shape
    total = np.zeros(B, dtype=np.int64)
    alive = np.ones(B, dtype=bool)
    rows = np.arange(B)
    for t in range(n):
        r = n - t
        v = valuations(a, p, m).reshape(B, r * r)
        flat = np.argmin(v, axis=1)
        vmin = v[rows, flat]
        alive &= vmin < m
        total += np.where(alive, vmin, 0)
        if t == n - 1:
            break
        pi, pj = np.divmod(flat, r)
        # bring the pivot to (0, 0); row/column swaps only flip the sign
        a = _swap_rows(a, pi)
        a = _swap_cols(a, pj)
        pv = np.array([p], dtype=dtype) ** np.minimum(vmin, m - 1).astype(dtype)
        pivot_row = a[:, 0, :]
        unit = pivot_row[:, 0] // pv
        coef = a[:, 1:, 0] // pv[:, None]
        a = (unit[:, None, None] * a[:, 1:, 1:] - coef[:, :, None] * pivot_row[:, None, 1:]) % q
    total = np.where(alive, np.minimum(total, m), m)
    return total


def _swap_rows(a, idx):
    a = a.copy()
    rows = np.arange(a.shape[0])
    first = a[:, 0, :].copy()
    a[:, 0, :] = a[rows, idx, :]
    a[rows, idx, :] = first
    return a


def _swap_cols(a, idx):
    a = a.copy()
    rows = np.arange(a.shape[0])
    first = a[:, :, 0].copy()
    a[:, :, 0] = a[rows, :, idx]
    a[rows, :, idx] = first
    return a
