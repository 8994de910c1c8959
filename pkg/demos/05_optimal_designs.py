"""D-optimal and TV-optimal designs, orbit reduction and the local Hessian check.

Run: python demos/05_optimal_designs.py
"""

import numpy as np

from tubedesign import (
    HankelMatrix,
    d_optimal_polynomial,
    local_hessian_check,
    reduce_to_orbit_rep,
    tv_optimal_fourier,
    tv_optimal_polynomial,
    volume_polynomial,
)

print("D-optimal n = 4 points:", np.round(d_optimal_polynomial(4).points, 6))
print("TV-optimal polynomial design:", tv_optimal_polynomial())
print("TV-optimal Fourier design (q = 2):", tv_optimal_fourier(2.0))

# Any n = 3 cone point reduces to a multiple of some M_v with v in (0, 1/3].
H = HankelMatrix([2.0, 0.3, 1.1, 0.4, 1.7])
op = reduce_to_orbit_rep(H)
print(f"\nreduction: v = {op.v:.9f} (dual {op.dual_v:.6f}), scale {op.scale:.6f}")
print("volume of H:", volume_polynomial(H).volume)

rep = local_hessian_check(3)
print("\nHessian eigenvalues at the D-optimal point:", np.array2string(rep.eigenvalues, precision=3))
print("near-zero eigenvalues:", rep.null_dim, " orbit dimension:", rep.orbit_dim)
