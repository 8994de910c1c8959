"""Band thresholds from the tube formula, the Naiman bound and simulation.

Run: python demos/06_confidence_bands.py [reps]
"""

import sys

from tubedesign import m_v, naiman_threshold, simulate_quantiles, tube_threshold, volume_polynomial

reps = int(sys.argv[1]) if len(sys.argv) > 1 else 20_000
M = m_v(1 / 3)
vol = volume_polynomial(M).volume
for alpha in (0.1, 0.05):
    print(f"alpha {alpha}: tube {tube_threshold(vol, alpha):.4f}  Naiman {naiman_threshold(vol, 2, alpha):.4f}")

w = simulate_quantiles(M, (0.1, 0.05), reps, seed=7)
print(f"simulated with {reps} reps (seed 7):", [round(x, 4) for x in w])
