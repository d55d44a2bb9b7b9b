import itertools
import json
import math
from fractions import Fraction

import numpy as np
import pytest

from padicflats import (
    BracketedValue,
    CoefficientAssignment,
    DegreeProfile,
    PadicContext,
    SeededStream,
    TooLarge,
    VolumeTable,
    build_template,
    closed_form,
    det_level_volume,
    exact_det_expectation,
    expected_flats,
    grassmannian_volume,
    mc_det_expectation,
    smooth_projective_zero_count,
)
from padicflats.counting import _leibniz_det
from padicflats.expectation import (
    McEstimate,
    expected_smooth_zero_count,
    hensel_cross_check,
    smooth_zero_counts,
)
from padicflats._enum import residue_tuples, valuations
from padicflats.jacobian import instantiate_batch
from padicflats.sampling import monomials

CUBIC = DegreeProfile(3, 1, (3,))
QUADRICS = DegreeProfile(4, 1, (2, 2))


def points(n):
    return DegreeProfile(n, 0, (1,) * n)


def oracle_bracket(profile, p, m):
    t = build_template(profile)
    q = p**m
    mats = instantiate_batch(t, residue_tuples(q, t.var_count))
    v = valuations(_leibniz_det(mats, q), p, m)
    hist = np.bincount(v, minlength=m + 1)
    lo = sum(Fraction(int(c), p**i) for i, c in enumerate(hist[:m])) / q**t.var_count
    return BracketedValue(lo, lo + Fraction(int(hist[m]), p**m * q**t.var_count))


def test_one_by_one_bracket():
    b = exact_det_expectation(build_template(points(1)), PadicContext(2, 3))
    assert b == BracketedValue(Fraction(21, 32), Fraction(43, 64))
    assert b.contains(Fraction(2, 3))


@pytest.mark.parametrize(
    "profile, p, m",
    [(CUBIC, 2, 1), (CUBIC, 2, 2), (CUBIC, 3, 1), (points(2), 3, 2), (points(3), 2, 1), (QUADRICS, 2, 1)],
    ids=str,
)
def test_exact_matches_leibniz_oracle(profile, p, m):
    assert exact_det_expectation(build_template(profile), PadicContext(p, m)) == oracle_bracket(profile, p, m)


@pytest.mark.parametrize(
    "profile, p, ms, ref",
    [
        (CUBIC, 2, (1, 2, 3), closed_form("cubic_det", 2)),
        (points(2), 2, (1, 2, 3), closed_form("detmatrix", 2, n=2)),
        (points(1), 5, (1, 2, 3, 4), closed_form("detmatrix", 5, n=1)),
        (QUADRICS, 2, (1,), closed_form("quadrics_det", 2)),
    ],
    ids=str,
)
def test_brackets_contain_reference_and_nest(profile, p, ms, ref):
    t = build_template(profile)
    brackets = [exact_det_expectation(t, PadicContext(p, m)) for m in ms]
    for b in brackets:
        assert b.contains(ref)
    for coarse, fine in zip(brackets, brackets[1:]):
        assert coarse.lo <= fine.lo <= fine.hi <= coarse.hi
        assert fine.width < coarse.width


def test_worker_count_does_not_change_exact_result():
    t = build_template(CUBIC)
    ctx = PadicContext(3, 1)
    assert exact_det_expectation(t, ctx, workers=1) == exact_det_expectation(t, ctx, workers=4)


def test_exact_guard():
    with pytest.raises(TooLarge):
        exact_det_expectation(build_template(QUADRICS), PadicContext(3, 2), guard=10**6)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("p", [2, 3, 7])
def test_detmatrix_is_the_mean_over_det_levels(n, p):
    # E|det| = sum_ell p^-ell * vol(|det| = p^-ell); the tail past L is < p^-L
    L = 80
    partial = sum(Fraction(1, p**ell) * det_level_volume(n, ell, p) for ell in range(L))
    target = closed_form("detmatrix", p, n=n)
    assert 0 <= target - partial < Fraction(1, p**L)


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 101])
def test_cubic_and_quadrics_factor_through_grassmannian(p):
    table = VolumeTable(p)
    assert closed_form("cubic", p) == grassmannian_volume(1, 3, table) * closed_form("cubic_det", p)
    assert closed_form("quadrics", p) == grassmannian_volume(1, 4, table) * closed_form("quadrics_det", p)
    for n in (1, 2, 3, 5):
        assert grassmannian_volume(0, n, table) * closed_form("detmatrix", p, n=n) == closed_form("points", p)


@pytest.mark.parametrize(
    "case, p, kw, expected",
    [
        ("cubic", 2, {}, Fraction(35, 31)),
        ("detmatrix", 2, {"n": 2}, Fraction(4, 7)),
        ("lower_bound", 5, {"n": 3, "k": 1}, Fraction(9, 25)),
        ("points", 7, {"n": 4}, Fraction(1)),
        ("quadrics", 3, {}, Fraction(1)),
        ("limsup_bound", 2, {}, Fraction(8, 3)),
        ("cubic_det", 5, {}, Fraction(625, 781)),
    ],
)
def test_closed_forms(case, p, kw, expected):
    assert closed_form(case, p, **kw) == expected


def test_closed_form_errors():
    with pytest.raises(ValueError):
        closed_form("nope", 2)
    with pytest.raises(ValueError):
        closed_form("detmatrix", 2)


def test_lower_bound_is_clamped_for_small_primes():
    assert closed_form("lower_bound", 2, n=3, k=1) == 0
    assert closed_form("lower_bound", 3, n=3, k=2) == 0


def test_mc_estimate_statistics():
    hist = (5, 3, 2, 0, 1)  # p=2, m=4
    est = McEstimate.from_histogram(hist, 2, 4, seed=0)
    xs = [1.0] * 5 + [0.5] * 3 + [0.25] * 2 + [1 / 32]
    assert float(est.mean) == pytest.approx(np.mean(xs))
    assert est.std_error == pytest.approx(np.std(xs, ddof=1) / math.sqrt(11))
    assert est.mean_bracket.width == Fraction(1, 16 * 11)


def test_mc_is_deterministic_and_partition_independent():
    t = build_template(CUBIC)
    ctx = PadicContext(3, 6)
    a = mc_det_expectation(t, ctx, SeededStream(5), 60_000, workers=1)
    b = mc_det_expectation(t, ctx, SeededStream(5), 60_000, workers=3)
    c = mc_det_expectation(t, ctx, SeededStream(6), 60_000, workers=3)
    assert a == b
    assert a.histogram != c.histogram


def test_mc_needs_samples():
    with pytest.raises(ValueError):
        mc_det_expectation(build_template(CUBIC), PadicContext(2, 3), SeededStream(0), 99)


def test_mc_points_detmatrix():
    est = mc_det_expectation(build_template(points(3)), PadicContext(3, 10), SeededStream(0), 200_000)
    assert est.within(Fraction(27, 40))


@pytest.mark.parametrize("profile, p", [(CUBIC, 3), (QUADRICS, 5), (points(2), 2)], ids=str)
def test_bound_sandwich(profile, p):
    r = expected_flats(profile, "mc", p=p, precision=8, samples=20_000, seed=3)
    est = r.det_expectation
    lower = closed_form("lower_bound", p, n=profile.n, k=profile.k)
    assert float(lower) - 4 * est.std_error <= float(est.mean_bracket.lo)
    assert est.mean_bracket.hi <= 1


def test_large_modulus_default_precision():
    r = expected_flats(points(2), "mc", p=7, samples=20_000, seed=1)
    assert r.m == 20
    assert r.agrees_with(1)


def test_expected_flats_record():
    r = expected_flats(CUBIC, "exact", p=2, precision=3)
    assert r.grassmannian_factor == Fraction(35, 16)
    assert r.count_bracket.contains(Fraction(35, 31))
    rec = json.loads(json.dumps(r.to_record()))
    for key in ("profile", "p", "m", "method", "lo", "hi", "std_error", "samples", "seed", "reference_value", "pass"):
        assert key in rec
    assert rec["reference_value"] == "35/31" and rec["pass"] is True
    assert Fraction(rec["lo"]) == r.count_bracket.lo


def test_unknown_profile_has_no_reference():
    r = expected_flats(DegreeProfile(4, 1, (3, 1)), "mc", p=5, samples=1000, seed=0)
    rec = r.to_record()
    assert rec["reference_value"] is None and rec["pass"] is None


def poly(p, d, n, coeffs):
    return CoefficientAssignment.from_dict(PadicContext(p, 1), d, n, coeffs)


def test_smooth_zero_examples():
    assert smooth_projective_zero_count([poly(5, 1, 2, {(1, 0, 0): 1}), poly(5, 1, 2, {(0, 1, 0): 1})], 2) == 1
    assert smooth_projective_zero_count([poly(3, 2, 1, {(1, 1): 1})], 1) == 2
    assert smooth_projective_zero_count([poly(3, 2, 1, {(2, 0): 1})], 1) == 0


@pytest.mark.parametrize("p, degrees", [(2, (2,)), (3, (2,)), (2, (1, 1)), (2, (2, 1)), (3, (1, 1))])
def test_expected_smooth_count_over_all_systems(p, degrees):
    n = len(degrees)
    sizes = [len(monomials(d, n + 1)) for d in degrees]
    total, count = 0, 0
    for flat in itertools.product(range(p), repeat=sum(sizes)):
        coeffs, i = [], 0
        for d, s in zip(degrees, sizes):
            coeffs.append(CoefficientAssignment.from_vector(PadicContext(p, 1), d, n, flat[i : i + s]))
            i += s
        total += smooth_projective_zero_count(coeffs, n)
        count += 1
    assert Fraction(total, count) == expected_smooth_zero_count(p, n)


def test_batched_smooth_counts_match_scalar():
    rng = np.random.default_rng(4)
    p, degrees, n = 5, (2, 3), 2
    coeffs = [rng.integers(0, p, size=(40, len(monomials(d, n + 1)))) for d in degrees]
    batch = smooth_zero_counts(degrees, n, p, coeffs)
    for b in range(40):
        system = [CoefficientAssignment.from_vector(PadicContext(p, 1), d, n, c[b]) for d, c in zip(degrees, coeffs)]
        assert batch[b] == smooth_projective_zero_count(system, n)


def test_hensel_check_near_exact_mean():
    h = hensel_cross_check(5, (2, 2), samples=5000, seed=2)
    assert abs(float(h.mean - expected_smooth_zero_count(5, 2))) < 4 * h.std_error
