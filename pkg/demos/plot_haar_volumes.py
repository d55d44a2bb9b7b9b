"""
Haar volumes and matrix counts
==============================

The fraction of n x n matrices over Z/p^m with determinant of valuation
exactly ell does not depend on m once m > ell.  We count and compare.
"""

from padicflats import VolumeTable, det_level_volume, gl_volume, grassmannian_volume
from padicflats import counting as C

p = 3
table = VolumeTable(p)
print("vol GL_2(Z_3) =", gl_volume(2, table))

# brute force over all 3^8 matrices mod 9
for ell in range(2):
    brute = C.count_det_level(2, p, 2, ell)
    print(f"ell={ell}: counted {brute}, predicted {p ** 8 * det_level_volume(2, ell, table)}")

# total mass of lines in P^3, and of points in P^n
print("mass of lines in P^3:", grassmannian_volume(1, 3, table))
for n in range(1, 5):
    print(f"mass of P^{n}:", grassmannian_volume(0, n, table))
