"""
Counting over Z/p^n
===================

Unit triples on a conic, unit quadruples on a quadric surface, and the
fibers of the map sending a 3 x 2 matrix to its three minors.
"""

from padicflats import counting as C

for p in (2, 3, 5):
    for k in (1, 2):
        print(f"p={p} k={k}: A={C.count_A(k, p)} (formula {C.formula_A(k, p)})")

print("singular 2x2 mod 4:", C.count_singular_2x2(2, 2))

r = C.minor_fibers_3x2(2, 2)
print("targets:", len(r.fiber_sizes), "of", C.projective_space_size(2, 2, 2))
for m1, sizes in sorted(r.sizes_by_m1().items()):
    print(f"  m1={m1}: fiber sizes {sorted(sizes)}, formula {r.formula(m1)}")
print("full-rank matrices landing on the conic:", r.degenerate_size)
