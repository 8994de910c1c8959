"""Moebius maps act on the moment cone and leave the tube volume unchanged.

Run: python demos/03_mobius_invariance.py
"""

import numpy as np

from tubedesign import act_on_matrix, m_v, rep_matrix, volume_polynomial

rng = np.random.default_rng(3)
M = m_v(0.2)
base = volume_polynomial(M).volume
print(f"Vol(M_0.2) = {base:.12f}")
for _ in range(5):
    p = tuple(rng.normal(size=4))
    A = rep_matrix(3, p)
    moved = act_on_matrix(A, M)
    vol = volume_polynomial(moved).volume
    det = p[0] * p[3] - p[1] * p[2]
    print(f"det {det:+.3f}: moments {np.round(moved.moments, 4)}  Vol = {vol:.12f}")
