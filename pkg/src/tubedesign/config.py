"""Numerical tolerances shared across the package.

All values are engineering choices; change them here rather than at the
call sites.
"""

# Moebius parameters are degenerate when |ad - bc| <= DEGENERACY_TOL * max(1, |p|^2).
DEGENERACY_TOL = 1e-12

# Cholesky pivot floor relative to the trace, for cone membership.
CONE_PIVOT_TOL = 1e-12

# Companion-matrix roots count as real when |Im| < ROOT_IMAG_TOL * (1 + |Re|).
ROOT_IMAG_TOL = 1e-8

# Relative spacing below which canonical atoms count as coincident, and the
# relative mass at infinity below which a matrix is treated as on the boundary.
ATOM_SEPARATION_TOL = 1e-9
BOUNDARY_MASS_TOL = 1e-12

# Hankel symmetry check after a group action.
HANKEL_SYMMETRY_TOL = 1e-8

# Adaptive Gauss-Kronrod defaults.
QUAD_ABS_TOL = 1e-9
QUAD_MAX_DEPTH = 40
QUAD_MAX_EVALUATIONS = 2_000_000
# integrand noise is taken as NOISE_FACTOR * eps * cond(M); a result whose
# error bound exceeds QUAD_ERROR_CEILING * max(tol, |value|) is a failure
NOISE_FACTOR = 10.0
QUAD_ERROR_CEILING = 1e-6

# Negative values of the squared speed above this are round-off and clamped to 0.
SPEED_CLAMP_TOL = 1e-12

# Sextic root search for the orbit reduction.
SEXTIC_BRACKET = 1e6
SEXTIC_BISECT_TOL = 1e-13
SEXTIC_FACTOR_TOL = 1e-10

# Symmetric square root eigenvalue floor relative to the largest eigenvalue.
SQRT_EIG_FLOOR = 1e-14

# Monte Carlo defaults.
MC_GRID_SIZE = 2048
MC_GOLDEN_TOL = 1e-10
MC_CHUNK_SIZE = 10_000
MC_CANDIDATES = 4
