"""
Lines on two quadrics in P^4
============================

Here the mean is exactly one for every p.  Sampling shows it.
"""

from padicflats import DegreeProfile, build_template, expected_flats

prof = DegreeProfile(4, 1, (2, 2))
t = build_template(prof)
print(f"{t.size}x{t.size} Jacobian in {t.var_count} variables")
for row in t.symbolic():
    print("  ".join(f"{c:>9}" for c in row))

for p in (2, 3, 5):
    r = expected_flats(prof, "mc", p=p, precision=8, samples=50_000, seed=p)
    ec = r.expected_count
    print(f"p={p}: {float(ec.mean):.4f} +- {ec.std_error:.4f}")
