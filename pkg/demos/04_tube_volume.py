"""Tube volume along the orbit family M_v and along a Fourier mixing path.

Run: python demos/04_tube_volume.py
"""

import numpy as np

from tubedesign import MIN_VOLUME, len_of_v, lower_bound_len, mixing_curve

print(f"4 pi sqrt(2/3) = {MIN_VOLUME:.9f}")
for v in (0.05, 0.1, 0.2, 1 / 3, 0.5, 0.9):
    lb = f"{lower_bound_len(v):.6f}" if v <= 1 / 3 else "   n/a  "
    print(f"v = {v:.4f}  len(v) = {len_of_v(v):.9f}  lower bound {lb}")

# Volume is not convex in the mixing weight: look for a negative second difference.
cs = np.linspace(0, 1, 101)
vols = np.array([vol for _, vol in mixing_curve(cs)])
d2 = np.diff(vols, 2)
i = int(np.argmin(d2))
print(f"\nmixing curve: Vol(0) = {vols[0]:.6f}, Vol(1) = {vols[-1]:.6f}")
print(f"most negative second difference {d2[i]:.3e} near c = {cs[i + 1]:.2f}")
