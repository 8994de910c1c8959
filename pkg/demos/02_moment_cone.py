"""Information matrices, the Hankel moment cone and canonical representations.

Run: python demos/02_moment_cone.py
"""

import numpy as np

from tubedesign import Design, Model, canonical_rep, info_matrix, is_in_cone

model = Model.polynomial(3)
design = Design((-np.sqrt(3), 0.0, np.sqrt(3)), (1 / 3, 1 / 3, 1 / 3), "real")
H = info_matrix(model, design)
print("moments of the D-optimal design:", np.round(H.moments / H.moments[0], 12))
print("inside the cone:", is_in_cone(H))

# Every interior point is n - 1 finite atoms plus a mass at infinity.
rep = canonical_rep(H)
print("canonical atoms:", rep.points, "weights:", rep.weights, "mass at infinity:", rep.infinity_weight)

print("(1, 0, 0, 0, 1) in the cone:", is_in_cone([1, 0, 0, 0, 1]))
