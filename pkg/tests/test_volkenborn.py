from fractions import Fraction

import pytest
import sympy

from padicflats import NonUnitDenominator, PadicContext, PolynomialIntegrand, padic_limit_check, volkenborn_partial
from padicflats.padic import padic_of_rational
from padicflats.volkenborn import convergence_valuations, cubic_det_closed_form, cubic_det_integrand

IDENTITY = PolynomialIntegrand(1, ((1, (1,)),))


def test_identity_partial():
    part = volkenborn_partial(IDENTITY, 2, 3)
    assert part.normalized_sum == Fraction(7, 2) == Fraction(sum(range(8)), 8)
    assert convergence_valuations([part], Fraction(-1, 2), 2) == [2]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_constant(n):
    c = PolynomialIntegrand.constant(Fraction(-1, 9), 2)
    assert volkenborn_partial(c, 3, n).normalized_sum == Fraction(-1, 9)


def test_constant_converges_trivially():
    c = PolynomialIntegrand.constant(Fraction(-1, 9))
    parts = [volkenborn_partial(c, 5, n) for n in (1, 2, 3)]
    assert padic_limit_check(parts, Fraction(-1, 9), PadicContext(5, 3))


def test_identity_does_not_converge_to_zero():
    parts = [volkenborn_partial(IDENTITY, 2, n) for n in (1, 2, 3)]
    assert not padic_limit_check(parts, 0, PadicContext(2, 3))


def test_limit_check_rejects_non_integral_target():
    with pytest.raises(NonUnitDenominator):
        padic_limit_check([volkenborn_partial(IDENTITY, 3, 1)], Fraction(1, 3), PadicContext(3, 2))


def test_cubic_integrand_matches_symbolic_expansion():
    x = sympy.symbols("x1:7")
    x1, x2, x3, x4, x5, x6 = x
    expected = sympy.Poly(sympy.expand((x1 * x6 - x3 * x4) ** 2 - (x1 * x5 - x2 * x4) * (x2 * x6 - x3 * x5)), *x)
    f = cubic_det_integrand()
    got = {tuple(e): int(c) for c, e in f.terms}
    assert got == {tuple(m): int(c) for m, c in expected.terms()}


@pytest.mark.parametrize("p, n", [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1)])
def test_cubic_raw_sum(p, n):
    f = cubic_det_integrand()
    part = volkenborn_partial(f, p, n)
    assert part.raw_sum == cubic_det_closed_form(p, n)
    assert volkenborn_partial(f, p, n, method="power_sums").raw_sum == part.raw_sum


def test_small_values():
    f = cubic_det_integrand()
    part = volkenborn_partial(f, 2, 1)
    assert part.raw_sum == 32 and part.normalized_sum == Fraction(1, 2)


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_partials_approach_minus_one_ninth(p, n):
    # power sums give the same exact partials without enumeration
    part = volkenborn_partial(cubic_det_integrand(), p, n, method="power_sums")
    slack = sympy.multiplicity(p, 36)
    diff = part.normalized_sum + Fraction(1, 9)
    assert diff == 0 or sympy.multiplicity(p, diff.numerator) - sympy.multiplicity(p, diff.denominator) >= n - slack


@pytest.mark.parametrize("p", [5, 7])
def test_partials_agree_with_minus_one_ninth_mod_pn(p):
    for n in (1, 2, 3):
        part = volkenborn_partial(cubic_det_integrand(), p, n, method="power_sums")
        ctx = PadicContext(p, n)
        assert padic_of_rational(part.normalized_sum, ctx) == padic_of_rational(Fraction(-1, 9), ctx)


def test_rate_is_slower_than_p_to_the_minus_n_at_three():
    f = cubic_det_integrand()
    parts = [volkenborn_partial(f, 3, n) for n in (1, 2)]
    assert convergence_valuations(parts, Fraction(-1, 9), 3) == [0, 6]
