"""Tube-volume optimal designs for Fourier and weighted polynomial regression.

The tube-volume (TV) criterion of a design is the length of the curve traced
on the unit sphere by the normalised, decorrelated regression basis. Smaller
length gives narrower simultaneous confidence bands.
"""

__version__ = "0.1.0"

from .bases import (
    INF,
    BasisEval,
    Model,
    bridge_matrix,
    fourier_basis,
    gram_b_inverse,
    polynomial_basis,
    tangent_map,
    tangent_map_inverse,
    variance_function,
    variance_p,
)
from .errors import (
    AccuracyFailure,
    DegenerateMobiusError,
    DesignValidationError,
    DomainError,
    FeasibilityWarning,
    InternalConsistencyFailure,
    InvalidDimensionError,
    NumericalActionFailure,
    NumericalFailure,
    ReductionFailure,
    RepresentationFailure,
    TubeDesignError,
)
from .mobius import (
    IDENTITY,
    MobiusParams,
    act_on_design,
    act_on_matrix,
    apply,
    compose,
    decompose,
    inverse,
    rep_matrix,
)
from .moments import CanonicalRep, Design, HankelMatrix, canonical_rep, info_matrix, is_in_cone, rescale_weights
from .volume import (
    MIN_VOLUME,
    integrand_n3,
    len_of_v,
    lower_bound_len,
    mixing_curve,
    volume_fourier,
    volume_polynomial,
)
from .optimal import (
    OrbitPoint,
    d_optimal_fourier,
    d_optimal_moments,
    d_optimal_polynomial,
    local_hessian_check,
    m_v,
    orbit_tangent,
    reduce_to_orbit_rep,
    tv_optimal_fourier,
    tv_optimal_polynomial,
    v_dual,
)
from .bands import (
    BandSpec,
    design_d_v,
    naiman_bound,
    naiman_bound_uniform_direction,
    naiman_threshold,
    simulate_quantiles,
    table_one,
    tube_threshold,
)
from .io import dump_design, parse_design, parse_design_text
