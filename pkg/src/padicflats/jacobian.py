"""Shape of the random Jacobian at the coordinate flat.

Rows are indexed by (block j, monomial u of degree d_j in y_0..y_k), listed
lexicographically descending inside each block.  Columns are indexed by
(s, i) with s in 1..n-k the outer coordinate and i in 0..k the inner one,
s-major.  Cell ((j,u),(s,i)) holds the coefficient of f_j at exponent
u - e_i + e_{k+s}, or zero when u_i = 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import comb

import numpy as np

from .exceptions import LengthMismatch, NotAdmissible
from .linalg import PadicMatrix
from .padic import PadicContext
from .sampling import monomials

__all__ = [
    "DegreeProfile",
    "VarRef",
    "JacobianTemplate",
    "check_codim",
    "build_template",
    "instantiate",
    "instantiate_batch",
    "admissible_profiles",
    "cubic_det_polynomial",
    "quadrics_det_polynomial",
    "det_polynomial",
]


@dataclass(frozen=True)
class DegreeProfile:
    n: int
    k: int
    degrees: tuple

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(int(d) for d in self.degrees))
        if not 0 <= self.k < self.n:
            raise ValueError(f"need 0 <= k < n, got k={self.k}, n={self.n}")
        if not self.degrees or min(self.degrees) < 1:
            raise ValueError("degrees must be a nonempty list of positive integers")

    @property
    def size(self) -> int:
        return (self.k + 1) * (self.n - self.k)

    @property
    def is_admissible(self) -> bool:
        return check_codim(self)

    def label(self) -> str:
        return f"n={self.n},k={self.k},d={','.join(map(str, self.degrees))}"

    def to_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "degrees": list(self.degrees)}


def check_codim(profile: DegreeProfile) -> bool:
    k = profile.k
    return sum(comb(k + d, d) for d in profile.degrees) == (k + 1) * (profile.n - k)


@dataclass(frozen=True)
class VarRef:
    block: int
    alpha: tuple

    def name(self) -> str:
        sep = "" if max(self.alpha) < 10 else "."
        return f"x{self.block + 1}_{sep.join(map(str, self.alpha))}"


@dataclass(frozen=True)
class JacobianTemplate:
    profile: DegreeProfile
    cells: tuple  # size x size, each None or a variable index
    variables: tuple  # VarRef per variable index
    row_labels: tuple  # (block, u)
    col_labels: tuple  # (s, i)

    @property
    def size(self) -> int:
        return len(self.cells)

    @property
    def var_count(self) -> int:
        return len(self.variables)

    def index_array(self) -> np.ndarray:
        """Cell -> variable index, with -1 for structural zeros."""
        return np.array([[-1 if c is None else c for c in row] for row in self.cells], dtype=np.int64)

    def occurrences(self) -> dict:
        occ = {v: [] for v in range(self.var_count)}
        for r, row in enumerate(self.cells):
            for c, cell in enumerate(row):
                if cell is not None:
                    occ[cell].append((r, c))
        return occ

    def check_shape(self) -> bool:
        """Every variable fills exactly k+1 cells, in k+1 distinct rows."""
        k = self.profile.k
        D = self.profile.size
        if self.size != D or any(len(row) != D for row in self.cells):
            return False
        for cells in self.occurrences().values():
            if len(cells) != k + 1 or len({r for r, _ in cells}) != k + 1:
                return False
        block_rows = [sum(1 for b, _ in self.row_labels if b == j) for j in range(len(self.profile.degrees))]
        return block_rows == [comb(k + d, d) for d in self.profile.degrees]

    def symbolic(self) -> list[list[str]]:
        return [["0" if c is None else self.variables[c].name() for c in row] for row in self.cells]

    def to_json(self, **kwargs) -> str:
        return json.dumps(
            {
                "profile": self.profile.to_dict(),
                "size": self.size,
                "var_count": self.var_count,
                "variables": [v.name() for v in self.variables],
                "cells": self.symbolic(),
            },
            **kwargs,
        )


def build_template(profile: DegreeProfile) -> JacobianTemplate:
    if not check_codim(profile):
        raise NotAdmissible(
            f"sum of C(k+d_j, d_j) over {profile.degrees} != (k+1)(n-k) for n={profile.n}, k={profile.k}"
        )
    n, k = profile.n, profile.k
    var_index = {}
    variables = []
    # variable order: block, then s, then the inner exponent of degree d_j - 1
    for j, d in enumerate(profile.degrees):
        for s in range(1, n - k + 1):
            for base in monomials(d - 1, k + 1):
                alpha = base + tuple(int(t == s) for t in range(1, n - k + 1))
                ref = VarRef(j, alpha)
                var_index[ref] = len(variables)
                variables.append(ref)

    col_labels = tuple((s, i) for s in range(1, n - k + 1) for i in range(k + 1))
    row_labels = []
    cells = []
    for j, d in enumerate(profile.degrees):
        for u in monomials(d, k + 1):
            row_labels.append((j, u))
            row = []
            for s, i in col_labels:
                if u[i] == 0:
                    row.append(None)
                    continue
                inner = tuple(x - (t == i) for t, x in enumerate(u))
                alpha = inner + tuple(int(t == s) for t in range(1, n - k + 1))
                row.append(var_index[VarRef(j, alpha)])
            cells.append(tuple(row))
    return JacobianTemplate(profile, tuple(cells), tuple(variables), tuple(row_labels), col_labels)


def instantiate(t: JacobianTemplate, draws, ctx: PadicContext | None = None) -> PadicMatrix:
    draws = list(draws)
    if len(draws) != t.var_count:
        raise LengthMismatch(f"template has {t.var_count} variables, got {len(draws)} draws")
    if ctx is None:
        ctxs = {getattr(x, "ctx", None) for x in draws}
        if len(ctxs) != 1 or None in ctxs:
            raise ValueError("draws must share one PadicContext (or pass ctx explicitly)")
        ctx = ctxs.pop()
    vals = [int(x) for x in draws]
    data = tuple(0 if c is None else vals[c] for row in t.cells for c in row)
    return PadicMatrix(ctx, t.size, t.size, data)


def instantiate_batch(t: JacobianTemplate, draws: np.ndarray) -> np.ndarray:
    """(B, var_count) residue draws -> (B, D, D) matrices."""
    draws = np.asarray(draws)
    if draws.ndim != 2 or draws.shape[1] != t.var_count:
        raise LengthMismatch(f"expected draws of shape (B, {t.var_count}), got {draws.shape}")
    padded = np.concatenate([np.zeros((draws.shape[0], 1), dtype=draws.dtype), draws], axis=1)
    return padded[:, t.index_array() + 1]


def admissible_profiles(max_n: int, max_k: int, max_degree: int = 5):
    """All admissible profiles with n <= max_n and k <= max_k.

    Degrees are listed nonincreasing.  For k >= 1 the codimension identity
    bounds the degrees by itself; for k = 0 every degree contributes 1, so
    max_degree is what keeps the list finite.
    """
    out = []
    for n in range(1, max_n + 1):
        for k in range(0, min(max_k, n - 1) + 1):
            target = (k + 1) * (n - k)
            cap = max_degree if k == 0 else max(d for d in range(1, target + 1) if comb(k + d, d) <= target)
            for degs in _partitions(target, k, cap, cap):
                out.append(DegreeProfile(n, k, degs))
    return out


def _partitions(target, k, max_d, cap):
    if target == 0:
        yield ()
        return
    for d in range(min(max_d, cap), 0, -1):
        w = comb(k + d, d)
        if w <= target:
            for rest in _partitions(target - w, k, d, cap):
                yield (d,) + rest


def _det3(r0, r1, r2):
    return (
        r0[0] * (r1[1] * r2[2] - r1[2] * r2[1])
        - r0[1] * (r1[0] * r2[2] - r1[2] * r2[0])
        + r0[2] * (r1[0] * r2[1] - r1[1] * r2[0])
    )


def cubic_det_polynomial(x):
    """det J for lines on a cubic surface, as a polynomial in the six variables (columns of x)."""
    x1, x2, x3, x4, x5, x6 = (x[..., i] for i in range(6))
    return (x1 * x6 - x3 * x4) ** 2 - (x1 * x5 - x2 * x4) * (x2 * x6 - x3 * x5)


def quadrics_det_polynomial(x):
    """det J for lines on two quadrics in P^4: k1 k4 - k2 k3.

    k_i is the 3x3 minor deleting row i of the 4x3 stack whose rows are the
    y0- and y1-parts of each quadric's mixed coefficients.
    """
    stack = [[x[..., 6 * j + b + 2 * s] for s in range(3)] for j in range(2) for b in range(2)]
    k = [_det3(*(stack[r] for r in range(4) if r != drop)) for drop in range(4)]
    return k[0] * k[3] - k[1] * k[2]


def det_polynomial(profile: DegreeProfile):
    """Closed-form determinant polynomial for the cubic and two-quadric profiles, else None."""
    key = (profile.n, profile.k, tuple(sorted(profile.degrees)))
    return {(3, 1, (3,)): cubic_det_polynomial, (4, 1, (2, 2)): quadrics_det_polynomial}.get(key)
