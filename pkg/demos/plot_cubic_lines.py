"""
Lines on a random cubic surface
===============================

The expected number of p-adic lines is the mass of lines in P^3 times
E|det J|_p for a 4 x 4 matrix built from six uniform coefficients.
"""

from fractions import Fraction

from padicflats import DegreeProfile, PadicContext, SeededStream, build_template, closed_form
from padicflats import exact_det_expectation, expected_flats, mc_det_expectation

cubic = DegreeProfile(3, 1, (3,))
t = build_template(cubic)
for row in t.symbolic():
    print("  ".join(f"{c:>8}" for c in row))

# exhaustive: every assignment mod 2^m, brackets shrink as m grows
for m in (1, 2, 3):
    b = exact_det_expectation(t, PadicContext(2, m))
    print(f"m={m}: E|det J|_2 in [{float(b.lo):.5f}, {float(b.hi):.5f}]  (16/31 = {16 / 31:.5f})")

# the assembled count at p = 2
r = expected_flats(cubic, "exact", p=2, precision=3)
print("expected lines at p=2:", r.count_bracket, " closed form", closed_form("cubic", 2))

# sampling at p = 5
est = mc_det_expectation(t, PadicContext(5, 8), SeededStream(1), 50_000)
print(f"p=5: {float(est.mean):.4f} +- {est.std_error:.4f}, exact {float(Fraction(625, 781)):.4f}")

# the values approach 1 from above as p grows
for p in (2, 3, 5, 7, 11, 101):
    print(p, float(closed_form("cubic", p)))
