"""Fourier and weighted-polynomial bases describe the same regression curve.

Run: python demos/01_bases_and_bridge.py
"""

import numpy as np

from tubedesign import bridge_matrix, fourier_basis, gram_b_inverse, polynomial_basis, tangent_map

n = 3
B = bridge_matrix(n)
print("bridge matrix B for n = 3:\n", np.round(B, 6))

# The Fourier basis at t and the polynomial basis at x = tan(pi t) differ by B
# and a scalar weight only, so their directions on the sphere coincide.
for t in (0.1, 0.3, -0.2):
    x = tangent_map(t)
    f = fourier_basis(n, t).f
    g = B @ polynomial_basis(n, x).f
    cos = abs(f @ g) / (np.linalg.norm(f) * np.linalg.norm(g))
    print(f"t = {t:+.2f}  x = {x:+.4f}  |cos angle| = {cos:.15f}")

print("\n(B^T B)^-1 for n = 3 (entries 3/8 and 1/8):\n", gram_b_inverse(3))
