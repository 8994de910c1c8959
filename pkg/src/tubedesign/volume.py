"""The tube-volume (TV) criterion.

For a basis ``f`` with derivative ``g`` and covariance ``Sigma = M^{-1}`` the
criterion is the length of the curve ``{+-psi(x)}``, ``psi = Sigma^{1/2} f / |Sigma^{1/2} f|``,
on the unit sphere::

    Vol = 2 * int sqrt(det[[f'Sf, f'Sg], [g'Sf, g'Sg]]) / (f'Sf) dx

Polynomial integrals over the real line are computed after ``x = tan(pi t)``,
which turns them into integrals of smooth 1-periodic functions on
``(-1/2, 1/2]`` with the point at infinity at ``t = 1/2``.
"""

from math import pi, sqrt
from typing import NamedTuple

import numpy as np
from scipy.linalg import solve_triangular

from . import config
from .bases import fourier_basis_arrays, projective_basis_arrays
from .errors import AccuracyFailure, DomainError, InternalConsistencyFailure, InvalidDimensionError
from .moments import as_hankel, is_in_cone
from .quadrature import adaptive_gk15, periodic_midpoint

__all__ = [
    "MIN_VOLUME",
    "MIXING_MATRIX",
    "VolumeResult",
    "h_coefficients",
    "integrand_n3",
    "len_of_v",
    "len_integrand",
    "lower_bound_integrand",
    "lower_bound_len",
    "mixing_curve",
    "mixing_matrix",
    "scan_len",
    "volume_fourier",
    "volume_polynomial",
]

MIN_VOLUME = 4 * pi * sqrt(2.0 / 3.0)

# Fourier information matrix of the uniform design on {-1/12, 0, 1/12}
MIXING_MATRIX = np.array([
    [1.0, 0.0, (sqrt(2.0) + sqrt(6.0)) / 3.0],
    [0.0, 1.0 / 3.0, 0.0],
    [(sqrt(2.0) + sqrt(6.0)) / 3.0, 0.0, 5.0 / 3.0],
])


class VolumeResult(NamedTuple):
    volume: float
    quadrature_error: float
    nodes: int


def _speed_integrand(basis, M, n):
    """Vectorised ``t -> 2 |d psi / dt|`` for ``Sigma = M^{-1}``.

    Uses ``L^{-1} f`` and ``L^{-1} g`` with ``M = L L^T`` and a Gram-Schmidt
    step, so the 2x2 determinant never forms by cancellation.
    """
    M = np.asarray(M, dtype=float)
    if M.shape != (n, n):
        raise InvalidDimensionError(f"matrix shape {M.shape} does not match n = {n}")
    scale = np.max(np.abs(np.diag(M)))
    try:
        L = np.linalg.cholesky(M / scale)
    except np.linalg.LinAlgError as exc:
        raise DomainError("information matrix is not positive definite") from exc

    def integrand(t):
        F, G = basis(n, t)
        U = solve_triangular(L, F.T, lower=True)
        V = solve_triangular(L, G.T, lower=True)
        ff = np.einsum("ij,ij->j", U, U)
        fg = np.einsum("ij,ij->j", U, V)
        W = V - (fg / ff) * U
        return 2.0 * np.sqrt(np.einsum("ij,ij->j", W, W) / ff)

    return integrand


def _noise_level(M):
    """Relative accuracy to expect from the integrand: about ``cond(M) * eps``."""
    lam = np.linalg.eigvalsh(np.asarray(M, dtype=float))
    if lam[0] <= 0:
        return None
    return config.NOISE_FACTOR * np.finfo(float).eps * lam[-1] / lam[0]


def _integrate(integrand, abs_tol, method, nodes, M=None):
    if method == "adaptive":
        noise = None if M is None else _noise_level(M)
        res = adaptive_gk15(integrand, -0.5, 0.5, abs_tol=abs_tol, rel_noise=noise)
        if res.error > config.QUAD_ERROR_CEILING * max(abs_tol, abs(res.value)):
            raise AccuracyFailure(
                f"integrand too ill-conditioned: error bound {res.error:.3g}", estimate=res.value, error=res.error)
        return VolumeResult(res.value, res.error, res.nodes)
    if method == "periodic":
        return VolumeResult(periodic_midpoint(integrand, -0.5, 0.5, nodes), float("nan"), nodes)
    raise ValueError(f"unknown quadrature method {method!r}")


def volume_polynomial(M, abs_tol=config.QUAD_ABS_TOL, closed_form=None, method="adaptive",
                      nodes=2048) -> VolumeResult:
    """TV criterion for the polynomial basis and information matrix ``M``.

    Parameters
    ----------
    M : HankelMatrix, moment vector or square matrix
        Must be positive definite.
    closed_form : bool, optional
        Use the explicit ``sqrt(h1) / h0`` integrand (``n = 3`` only). Defaults
        to the closed form for ``n = 3`` with a fallback to the generic path
        if the closed form fails to converge.
    method : {"adaptive", "periodic"}
        Adaptive Gauss-Kronrod to ``abs_tol``, or a fixed midpoint rule with
        ``nodes`` points.
    """
    H = as_hankel(M)
    n = H.n
    if not is_in_cone(H):
        raise DomainError("information matrix is not in the moment cone")
    if closed_form is None and n == 3:
        # the closed form is cheap but forms det(M) by cancellation; near the
        # cone boundary it can fail where the Cholesky path still converges
        try:
            return _integrate(_n3_angular_integrand(H), abs_tol, method, nodes, H.matrix)
        except (AccuracyFailure, InternalConsistencyFailure):
            closed_form = False
    if closed_form:
        if n != 3:
            raise InvalidDimensionError("the closed-form integrand exists only for n = 3")
        integrand = _n3_angular_integrand(H)
    else:
        integrand = _speed_integrand(projective_basis_arrays, H.matrix, n)
    return _integrate(integrand, abs_tol, method, nodes, H.matrix)


def volume_fourier(M, abs_tol=config.QUAD_ABS_TOL, method="adaptive", nodes=2048) -> VolumeResult:
    """TV criterion for the Fourier basis and a dense SPD information matrix."""
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    integrand = _speed_integrand(fourier_basis_arrays, M, n)
    return _integrate(integrand, abs_tol, method, nodes, M)


# ---------------------------------------------------------------------------
# n = 3 closed form


def h_coefficients(M):
    """Ascending coefficients of the quartics ``h1`` and ``h0`` for ``n = 3``.

    ``h0(x) = f_P(x)^T adj(M) f_P(x)`` and ``h1`` is the 2x2 Gram determinant
    of ``(f_P, g_P)`` under ``adj(M)``; the integrand is ``sqrt(h1) / h0``.
    """
    H = as_hankel(M)
    if H.n != 3:
        raise InvalidDimensionError("h-polynomials are defined for n = 3")
    m0, m1, m2, m3, m4 = H.moments
    det = m0 * m2 * m4 - m0 * m3**2 + 2 * m1 * m2 * m3 - m1**2 * m4 - m2**3
    h1 = det * np.array([m4, -4 * m3, 6 * m2, -4 * m1, m0])
    h0 = np.array([
        m2 * m4 - m3**2,
        2 * (-m1 * m4 + m2 * m3),
        m0 * m4 + 2 * m1 * m3 - 3 * m2**2,
        2 * (-m0 * m3 + m1 * m2),
        m0 * m2 - m1**2,
    ])
    return h1, h0


def _clamped_sqrt(h1, magnitude):
    floor = -config.SPEED_CLAMP_TOL * magnitude
    if np.any(h1 < floor):
        raise InternalConsistencyFailure(f"h1 is negative ({np.min(h1):.3g}); matrix is not in the cone")
    return np.sqrt(np.maximum(h1, 0.0))


def integrand_n3(M, x):
    """``sqrt(h1(x)) / h0(x)`` at real ``x`` (vectorised)."""
    h1c, h0c = h_coefficients(M)
    x = np.asarray(x, dtype=float)
    powers = x[..., None] ** np.arange(5)
    h1 = powers @ h1c
    h0 = powers @ h0c
    out = _clamped_sqrt(h1, np.abs(powers) @ np.abs(h1c)) / h0
    return float(out) if out.ndim == 0 else out


def _n3_angular_integrand(M):
    h1c, h0c = h_coefficients(M)
    k = np.arange(5)

    def integrand(t):
        c = np.cos(pi * t)[:, None]
        s = np.sin(pi * t)[:, None]
        basis = s**k * c ** (4 - k)
        H1 = basis @ h1c
        H0 = basis @ h0c
        return 2.0 * pi * _clamped_sqrt(H1, np.abs(basis) @ np.abs(h1c)) / H0

    return integrand


# ---------------------------------------------------------------------------
# The cross-section M_v


def len_integrand(x, v):
    """``s(x; v)``, the TV integrand of ``M_v = ((1,0,v),(0,v,0),(v,0,1))``."""
    x = np.asarray(x, dtype=float)
    x2 = x * x
    return (sqrt((1 - v * v) / v) * np.sqrt(1 + 6 * v * x2 + x2 * x2)
            / (1 + (1 / v - 3 * v) * x2 + x2 * x2))


def lower_bound_integrand(x, v):
    """Pointwise lower bound of ``s(x; v)``, valid for ``v <= 1/3``."""
    x = np.asarray(x, dtype=float)
    x2 = x * x
    one = 1 + x2
    return (sqrt((1 - v * v) / v) * (1 + 6 * v * x2 + x2 * x2)
            / ((1 + (1 / v - 3 * v) * x2 + x2 * x2) * one)
            * (1 + (1 - 3 * v) * x2 / one**2))


def len_of_v(v, abs_tol=config.QUAD_ABS_TOL) -> float:
    """``len(v) = Vol(gamma_{M_v^{-1}})`` by quadrature, for ``0 < v < 1``."""
    v = float(v)
    if not 0 < v < 1:
        raise DomainError(f"v must lie in (0, 1), got {v}")
    amp = sqrt((1 - v * v) / v)
    b = 1 / v - 3 * v

    def integrand(t):
        c2 = np.cos(pi * t) ** 2
        s2 = np.sin(pi * t) ** 2
        return 2.0 * pi * amp * np.sqrt(c2 * c2 + 6 * v * c2 * s2 + s2 * s2) / (c2 * c2 + b * c2 * s2 + s2 * s2)

    return adaptive_gk15(integrand, -0.5, 0.5, abs_tol=abs_tol).value


def lower_bound_len(v) -> float:
    """Closed-form residue evaluation of the lower bound of ``len(v)``, ``0 < v <= 1/3``."""
    v = float(v)
    if not 0 < v <= 1 / 3 + 1e-15:
        raise DomainError(f"the lower bound holds for v in (0, 1/3], got {v}")
    return (2 * pi * sqrt((1 - v * v) / v)
            * (3 * v**3 + 6 * v**2 - 5 * v + 8 * sqrt(v * (1 + 3 * v) / (1 - v)))
            / (4 * (1 + v) ** 2))


def scan_len(vs):
    """Rows ``(v, len(v), lower bound or None)`` for plotting."""
    rows = []
    for v in vs:
        lb = lower_bound_len(v) if v <= 1 / 3 + 1e-15 else None
        rows.append((float(v), len_of_v(v), lb))
    return rows


def mixing_matrix(c):
    """``(1 - c) I + c M_1`` for the two three-point Fourier designs."""
    return (1 - c) * np.eye(3) + c * MIXING_MATRIX


def mixing_curve(cs):
    """``(c, Vol)`` along the mixture of the uniform and the clustered Fourier design."""
    out = []
    for c in cs:
        c = float(c)
        if not 0 <= c <= 1:
            raise DomainError(f"mixing weight must lie in [0, 1], got {c}")
        out.append((c, volume_fourier(mixing_matrix(c)).volume))
    return out
