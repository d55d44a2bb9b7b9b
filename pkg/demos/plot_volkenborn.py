"""
Riemann sums of the cubic determinant
=====================================

Averaging det J over the box {0, ..., p^n - 1}^6 gives rationals that
converge p-adically, and the limit is -1/9 for every p.
"""

from fractions import Fraction

from padicflats.volkenborn import convergence_valuations, cubic_det_integrand, volkenborn_partial

f = cubic_det_integrand()
print("det J =", f)

for p in (2, 3, 5, 7):
    parts = [volkenborn_partial(f, p, n, method="power_sums") for n in range(1, 6)]
    vals = convergence_valuations(parts, Fraction(-1, 9), p)
    print(f"p={p}: v_p(partial_n + 1/9) for n=1..5 -> {vals}")
