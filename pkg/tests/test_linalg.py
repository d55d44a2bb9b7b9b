from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import assume, given, settings, strategies as st

from padicflats import (
    NotSquare,
    PadicContext,
    PadicMatrix,
    SingularAtPrecision,
    VolumeTable,
    det_level_volume,
    det_residue,
    gl_volume,
    grassmannian_volume,
    smith_decompose,
)
from padicflats.linalg import det_valuation_batch
from padicflats.padic import int_valuation


def sympy_det(rows, q):
    return int(sympy.Matrix(rows).det()) % q


@pytest.mark.parametrize(
    "rows, p, m, expected",
    [
        ([[1, 0, 0], [0, 1, 0], [0, 0, 1]], 7, 3, 1),
        ([[2, 3], [4, 5]], 2, 4, 14),
        ([[1, 1], [1, 1]], 3, 2, 0),
    ],
)
def test_det_examples(rows, p, m, expected):
    assert det_residue(PadicMatrix.from_rows(PadicContext(p, m), rows)).residue == expected


def test_det_requires_square(ctx2):
    with pytest.raises(NotSquare):
        det_residue(PadicMatrix.from_rows(ctx2, [[1, 2, 3], [4, 5, 6]]))


@st.composite
def matrices(draw, max_n=4):
    p = draw(st.sampled_from([2, 3, 5]))
    m = draw(st.integers(1, 5))
    n = draw(st.integers(1, max_n))
    q = p**m
    rows = [[draw(st.integers(0, q - 1)) for _ in range(n)] for _ in range(n)]
    return PadicMatrix.from_rows(PadicContext(p, m), rows)


@given(matrices())
def test_det_matches_sympy(M):
    assert det_residue(M).residue == sympy_det(M.tolist(), M.ctx.modulus)


@pytest.mark.parametrize(
    "diag_or_rows, p, m, expected",
    [
        ([[2, 0], [0, 4]], 2, 3, (1, 2)),
        ([[2, 3], [4, 5]], 2, 4, (0, 1)),
        ([[1, 2], [3, 4]], 5, 2, (0, 0)),
    ],
)
def test_smith_examples(diag_or_rows, p, m, expected):
    M = PadicMatrix.from_rows(PadicContext(p, m), diag_or_rows)
    s = smith_decompose(M)
    assert s.u_exponents == expected
    assert s.reconstruct() == M


def test_smith_of_diagonal_keeps_identity_factors():
    ctx = PadicContext(2, 3)
    s = smith_decompose(PadicMatrix.diagonal(ctx, [2, 4]))
    assert s.left == PadicMatrix.identity(ctx, 2)
    assert s.right == PadicMatrix.identity(ctx, 2)


def test_smith_rejects_singular_at_precision():
    with pytest.raises(SingularAtPrecision):
        smith_decompose(PadicMatrix.from_rows(PadicContext(3, 2), [[1, 1], [1, 1]]))


@settings(max_examples=150)
@given(matrices())
def test_smith_reconstructs_and_matches_det(M):
    try:
        s = smith_decompose(M)
    except SingularAtPrecision:
        assume(False)
    assert s.reconstruct() == M
    assert s.left.is_invertible() and s.right.is_invertible()
    assert list(s.u_exponents) == sorted(s.u_exponents)
    assert max(s.u_exponents) < M.ctx.precision
    d = det_residue(M)
    if d.residue:
        assert sum(s.u_exponents) == int_valuation(d.residue, M.ctx.prime)
    else:
        assert sum(s.u_exponents) >= M.ctx.precision


@settings(max_examples=60)
@given(matrices(max_n=5), st.integers(0, 2**32))
def test_det_valuation_batch_matches_sympy(M, seed):
    p, m, q = M.ctx.prime, M.ctx.precision, M.ctx.modulus
    rng = np.random.default_rng(seed)
    n = M.rows
    mats = rng.integers(0, q, size=(20, n, n))
    mats[0] = np.array(M.tolist())
    # make a few highly divisible so censoring gets exercised
    mats[1] *= p
    mats[2, 0] = mats[2, -1]
    got = det_valuation_batch(mats, p, m)
    for g, a in zip(got, mats):
        d = sympy_det(a.tolist(), q)
        assert g == (m if d == 0 else int_valuation(d, p))


def test_det_valuation_batch_large_modulus():
    # p^m beyond int64 products goes through the two-stage path
    p, m = 7, 20
    q = p**m
    rng = np.random.default_rng(5)
    mats = np.array([[int(x) for x in row] for row in rng.integers(0, 2**62, size=(40, 9))], dtype=object)
    mats = (mats % q).reshape(40, 3, 3)
    mats[:10] *= p**7
    got = det_valuation_batch(mats, p, m)
    for g, a in zip(got, mats):
        d = sympy_det(a.tolist(), q)
        assert g == (m if d == 0 else int_valuation(d, p))


@pytest.mark.parametrize(
    "n, p, expected",
    [(2, 2, Fraction(3, 8)), (1, 5, Fraction(4, 5)), (3, 3, Fraction(416, 729))],
)
def test_gl_volume(n, p, expected):
    assert gl_volume(n, VolumeTable(p)) == expected


@pytest.mark.parametrize(
    "n, ell, p, expected",
    [(2, 0, 2, Fraction(3, 8)), (2, 1, 2, Fraction(9, 32))],
)
def test_det_level_volume(n, ell, p, expected):
    assert det_level_volume(n, ell, p) == expected


@pytest.mark.parametrize("n, p", [(1, 2), (2, 2), (2, 3), (3, 5)])
def test_det_levels_sum_to_one(n, p):
    # tail of the level series is bounded by p^-L, so partial sums close in
    L = 60
    total = sum(det_level_volume(n, ell, p) for ell in range(L))
    assert 0 < 1 - total < Fraction(L + 1, p**L) * 10


@pytest.mark.parametrize(
    "k, n, p, expected",
    [(1, 3, 2, Fraction(35, 16)), (0, 2, 2, Fraction(7, 4)), (1, 4, 2, Fraction(155, 64))],
)
def test_grassmannian_volume(k, n, p, expected):
    assert grassmannian_volume(k, n, p) == expected


@pytest.mark.parametrize("n", range(1, 7))
@pytest.mark.parametrize("p", [2, 3, 7])
def test_grassmannian_duality(n, p):
    for k in range(n):
        assert grassmannian_volume(k, n, p) == grassmannian_volume(n - 1 - k, n, p)


@pytest.mark.parametrize("n, p", [(2, 2), (3, 3), (4, 5)])
def test_projective_space_mass(n, p):
    assert grassmannian_volume(0, n, p) == Fraction(p ** (n + 1) - 1, p**n * (p - 1))
