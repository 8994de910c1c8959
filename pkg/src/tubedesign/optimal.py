"""D-optimal and tube-volume optimal designs, and the orbit reduction for n = 3.

The TV criterion is invariant under the Moebius action ``M -> A M A^T``. For
``n = 3`` every cone point lies on the orbit of exactly one

    M_v = ((1, 0, v), (0, v, 0), (v, 0, 1)),   0 < v <= 1/3,

and the minimum ``4 pi sqrt(2/3)`` is attained on the orbit of ``M_{1/3}``,
which contains the information matrices of the D-optimal designs.
"""

from math import gamma, pi, sqrt
from typing import NamedTuple

import numpy as np

from . import config
from .bases import INF, Model, _check_dim, is_infinite, variance_function
from .errors import AccuracyFailure, DomainError, InvalidDimensionError, ReductionFailure
from .mobius import IDENTITY, MobiusParams, apply, compose, inverse, rep_matrix
from .moments import Design, HankelMatrix, as_hankel, canonical_rep
from .volume import volume_polynomial

__all__ = [
    "HessianReport",
    "OrbitPoint",
    "d_optimal_fourier",
    "d_optimal_moments",
    "d_optimal_polynomial",
    "local_hessian_check",
    "m_v",
    "orbit_tangent",
    "orbit_tangent_rank",
    "reduce_to_orbit_rep",
    "reduction_sextic",
    "trig_moment_closed",
    "trig_moment_sum",
    "tv_optimal_fourier",
    "tv_optimal_polynomial",
    "uniform_times",
    "v_dual",
]


def m_v(v):
    """The orbit representative ``M_v``."""
    return HankelMatrix([1.0, 0.0, v, 0.0, 1.0])


def v_dual(v):
    """``(1 - v) / (1 + 3 v)``: the other ``v`` on the same orbit."""
    v = float(v)
    if not 0 < v < 1:
        raise DomainError(f"v must lie in (0, 1), got {v}")
    return (1 - v) / (1 + 3 * v)


def uniform_times(n):
    """``t_i = i/n - (n+1)/(2n)``, ``i = 1..n``: equally spaced and symmetric about 0."""
    n = _check_dim(n)
    i = np.arange(1, n + 1)
    return i / n - (n + 1) / (2 * n)


# ---------------------------------------------------------------------------
# D-optimal designs


def d_optimal_fourier(n, theta=0.0) -> Design:
    """Uniform Fourier design ``{t_i - theta ; 1/n}``; its information matrix is ``I_n``."""
    n = _check_dim(n)
    if not -1 / (2 * n) < theta < 1 / (2 * n):
        raise DomainError(f"theta must lie in (-1/(2n), 1/(2n)), got {theta}")
    t = uniform_times(n) - theta
    return Design(tuple(t), (1.0 / n,) * n, "fourier")


def d_optimal_polynomial(n, variance=IDENTITY, rotation=(1.0, 0.0)) -> Design:
    """D-optimal ``n``-point design for variance ``sigma_P^2(.; variance)``.

    Atoms are ``phi^{-1}(phi(tan(pi t_i); s, -t, t, s); variance)`` with equal
    weights. Its information matrix is ``A0^{-1} (B^T B)^{-1} A0^{-T}``.
    """
    n = _check_dim(n)
    s, t = (float(r) for r in rotation)
    if abs(s * s + t * t - 1) > 1e-12:
        raise DomainError(f"rotation (s, t) must satisfy s^2 + t^2 = 1, got {(s, t)}")
    rot = MobiusParams(s, -t, t, s)
    back = inverse(variance)
    pts = []
    for t0 in uniform_times(n):
        y = apply(rot, float(np.tan(pi * t0)))
        pts.append(apply(back, y))
    return Design(tuple(pts), (1.0 / n,) * n, "real")


def d_optimal_moments(n) -> HankelMatrix:
    """Scaled (``m_0 = 1``) information matrix of the canonical D-optimal design.

    ``m_k = Gamma((k+1)/2) Gamma(n-(k+1)/2) / (sqrt(pi) Gamma(n-1/2))`` for
    even ``k``, zero for odd ``k``.
    """
    n = _check_dim(n)
    m = np.zeros(2 * n - 1)
    for k in range(0, 2 * n - 1, 2):
        m[k] = gamma((k + 1) / 2) * gamma(n - (k + 1) / 2) / (sqrt(pi) * gamma(n - 0.5))
    return HankelMatrix(m)


def trig_moment_sum(n, k, offset):
    """``(1/n) sum_i sin^{2k} cos^{2n-2k-2} (pi (i/n - offset))``, by direct summation."""
    t = np.arange(1, n + 1) / n - offset
    return float(np.mean(np.sin(pi * t) ** (2 * k) * np.cos(pi * t) ** (2 * n - 2 * k - 2)))


def trig_moment_closed(n, k):
    """``Gamma(k+1/2) Gamma(n-k-1/2) / (pi Gamma(n))``; independent of the offset."""
    return gamma(k + 0.5) * gamma(n - k - 0.5) / (pi * gamma(n))


# ---------------------------------------------------------------------------
# TV-optimal designs (n = 3)


def tv_optimal_polynomial(variance=IDENTITY, free=IDENTITY) -> Design:
    """Three-point TV-optimal design for variance ``sigma_P^2(.; variance)``.

    ``free`` is an arbitrary group element; ``free = variance`` (up to a
    rotation) recovers the D-optimal design.
    """
    back = inverse(free)
    pts = [apply(back, float(np.tan(pi * t0))) for t0 in uniform_times(3)]
    s_target = variance_function(3, variance)
    s_free = variance_function(3, free)
    w = np.array([s_target(x) / s_free(x) for x in pts])
    w /= w.sum()
    return Design(tuple(pts), tuple(w), "real")


def tv_optimal_fourier(q, r=0.0, theta=0.0) -> Design:
    """Three-point TV-optimal Fourier design.

    ``t_i = atan(q tan(pi (t0_i - theta)) + r) / pi`` with weights proportional
    to ``((1 + x_i^2) / (1 + tan^2(pi (t0_i - theta))))^2``, ``x_i`` the argument
    of the arctangent. Evaluated in homogeneous form so a tangent pole is harmless.
    """
    q = float(q)
    if q == 0:
        raise DomainError("q must be non-zero")
    ang = pi * (uniform_times(3) - theta)
    c, s = np.cos(ang), np.sin(ang)
    num = q * s + r * c
    times = []
    for ci, yi in zip(c, num):
        if abs(ci) <= 1e-15 * abs(yi):
            times.append(0.5)
        else:
            times.append(float(np.arctan(yi / ci) / pi))
    w = (c * c + num * num) ** 2
    w /= w.sum()
    return Design(tuple(times), tuple(w), "fourier")


# ---------------------------------------------------------------------------
# Orbit reduction (n = 3)


class OrbitPoint(NamedTuple):
    """``A(transform) M A(transform)^T = scale * M_v`` with ``|det transform| = 1``."""

    v: float
    transform: MobiusParams
    scale: float

    @property
    def dual_v(self):
        return v_dual(self.v)


def reduction_sextic(u, w):
    """Ascending coefficients of the sextic ``f(c; u, w)`` whose real roots zero the
    (1,2) and (2,3) entries of ``A N A^T`` for ``N = ((u,1,1),(1,1,1),(1,1,w))``."""
    return np.array([
        2 - 3 * u + u * u,
        6 - 7 * u + u * u * w,
        10 - 15 * u + 5 * u * w,
        -10 * u + 10 * w,
        -10 + 15 * w - 5 * u * w,
        -6 + 7 * w - u * w * w,
        -2 + 3 * w - w * w,
    ])


def _f1(c, u):
    return (c + 1) ** 3 + (u - 1)


def _f2(c, u, w):
    return 4 * c + 6 * c * c + 4 * c**3 + u + c**4 * w


def _sextic_roots(u, w):
    coeffs = reduction_sextic(u, w)
    poly = np.polynomial.Polynomial(coeffs)
    dpoly = poly.deriv()
    candidates = []
    roots = np.roots(coeffs[::-1])
    candidates += [r.real for r in roots if abs(r.imag) < 1e-6 * (1 + abs(r.real))]
    # sign-change brackets on the anchors guaranteed by the existence argument
    X = config.SEXTIC_BRACKET
    anchors = [-X, -1.0, 0.0, X]
    vals = [poly(a) for a in anchors]
    for (lo, flo), (hi, fhi) in zip(zip(anchors, vals), zip(anchors[1:], vals[1:])):
        if flo == 0:
            candidates.append(lo)
        elif flo * fhi < 0:
            while hi - lo > config.SEXTIC_BISECT_TOL * max(1.0, abs(lo)):
                mid = 0.5 * (lo + hi)
                fm = poly(mid)
                if fm == 0:
                    lo = hi = mid
                    break
                if fm * flo < 0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            candidates.append(0.5 * (lo + hi))
    polished = []
    for x in candidates:
        for _ in range(3):
            d = dpoly(x)
            if d == 0:
                break
            step = poly(x) / d
            if not np.isfinite(step) or abs(step) > 1e-3 * (1 + abs(x)):
                break
            x -= step
        polished.append(float(x))
    return polished, poly


def _reduce_unit(u, w):
    """Group element taking ``((u,1,1),(1,1,1),(1,1,w))`` to the form ``((*,0,*),(0,*,0),(*,0,*))``."""
    if abs(u - 2) <= 1e-12:
        return MobiusParams(1.0, -0.5, 0.0, 1.0)
    roots, poly = _sextic_roots(u, w)
    scale = np.abs(reduction_sextic(u, w)).max()
    good = [
        x for x in roots
        if abs(poly(x)) <= 1e-8 * scale * (1 + abs(x)) ** 6
        and abs(_f1(x, u)) > config.SEXTIC_FACTOR_TOL
        and abs(_f2(x, u, w)) > config.SEXTIC_FACTOR_TOL
    ]
    if not good:
        raise ReductionFailure(
            "no admissible real root of the reduction sextic",
            condition={"u": u, "w": w, "roots": roots},
        )
    c = min(good, key=abs)
    b = -(c**3 * w + 3 * c * c + 3 * c + 1) / _f1(c, u)
    return MobiusParams(1.0, b, c, 1.0)


def reduce_to_orbit_rep(M) -> OrbitPoint:
    """Find ``v in (0, 1/3]`` and a group element mapping ``M`` onto the ray of ``M_v``.

    Steps: canonical representation -> ``((u,1,1),(1,1,1),(1,1,w))`` by an
    affine map; a root of the reduction sextic zeroes the odd entries; a
    diagonal map balances the corners; ``v > 1/3`` is folded with the duality
    element ``(1, -1, 1, 1)``.
    """
    H = as_hankel(M)
    if H.n != 3:
        raise InvalidDimensionError("orbit reduction is implemented for n = 3")
    rep = canonical_rep(H)
    (x1, x2), (w1, w2), w0 = rep.points, rep.weights, rep.infinity_weight
    r = w2**0.25
    to_m = MobiusParams(r * (x1 - x2), -r * x1, 0.0, -r)
    u = w1 / w2 + 1.0
    w = w0 / (w2 * (x1 - x2) ** 4) + 1.0
    step2 = _reduce_unit(u, w)

    T = compose(step2, inverse(to_m))
    S = _act(T, H.matrix)
    corner = MobiusParams(S[2, 2] ** -0.25, 0.0, 0.0, S[0, 0] ** -0.25)
    T = compose(corner, T).normalized()
    S = _act(T, H.matrix)
    v = S[0, 2] / S[0, 0]
    if v > 1 / 3:
        T = compose(MobiusParams(1.0, -1.0, 1.0, 1.0), T).normalized()
        S = _act(T, H.matrix)
        v = S[0, 2] / S[0, 0]
    if not 0 < v <= 1 / 3 + 1e-9:
        raise ReductionFailure(f"reduction produced v = {v}", condition={"u": u, "w": w})
    return OrbitPoint(float(min(v, 1 / 3)), T, float(S[0, 0]))


def _act(params, M):
    A = rep_matrix(M.shape[0], params)
    return A @ M @ A.T


# ---------------------------------------------------------------------------
# Orbit tangent and local optimality


def _moments_of(S):
    n = S.shape[0]
    return np.concatenate((S[0, :], S[1:, -1]))


def orbit_tangent(M, with_scaling=False):
    """Derivative of ``(a, b, c, d) -> moments(A M A^T)`` at the identity.

    Returns a ``(2n-1) x 4`` matrix (one more column, ``m`` itself, when
    ``with_scaling``). Computed by complex-step differentiation, which is
    exact to rounding for the polynomial entries of ``A``.
    """
    H = as_hankel(M)
    n = H.n
    Mm = H.matrix
    h = 1e-20
    cols = []
    for k in range(4):
        p = np.array([1.0, 0.0, 0.0, 1.0], dtype=complex)
        p[k] += 1j * h
        A = rep_matrix(n, tuple(p))
        cols.append(_moments_of(A @ Mm @ A.T).imag / h)
    if with_scaling:
        cols.append(H.moments.copy())
    return np.column_stack(cols)


def orbit_tangent_rank(M, rel_tol=1e-8, with_scaling=False):
    sv = np.linalg.svd(orbit_tangent(M, with_scaling), compute_uv=False)
    return int(np.sum(sv > rel_tol * sv[0]))


class HessianReport(NamedTuple):
    eigenvalues: np.ndarray
    null_dim: int
    orbit_dim: int
    hessian: np.ndarray
    point: np.ndarray


def _fd_hessian(func, x, steps):
    dim = x.size
    f0 = func(x)
    H = np.empty((dim, dim))
    E = np.diag(steps)
    for i in range(dim):
        H[i, i] = (func(x + E[i]) - 2 * f0 + func(x - E[i])) / steps[i] ** 2
        for j in range(i):
            val = (func(x + E[i] + E[j]) - func(x + E[i] - E[j])
                   - func(x - E[i] + E[j]) + func(x - E[i] - E[j])) / (4 * steps[i] * steps[j])
            H[i, j] = H[j, i] = val
    return H


def local_hessian_check(n, rel_step=1e-4, nodes=2048, null_tol=1e-4, stability_tol=0.05):
    """Finite-difference Hessian of the TV criterion at the D-optimal moment point.

    Works in the moment chart ``(m_0, ..., m_{2n-2})`` with central steps
    ``rel_step * (1 + |m_k|)`` and a fixed-node periodic rule, so the objective
    is a smooth function of the moments. The Hessian is recomputed with doubled
    steps; a relative change above ``stability_tol`` raises
    :class:`AccuracyFailure`.
    """
    n = _check_dim(n)
    if not 3 <= n <= 6:
        raise DomainError("the Hessian check is supported for 3 <= n <= 6")
    m0 = d_optimal_moments(n).moments.copy()

    def vol(m):
        return volume_polynomial(HankelMatrix(m), method="periodic", nodes=nodes,
                                 closed_form=False).volume

    steps = rel_step * (1 + np.abs(m0))
    H = _fd_hessian(vol, m0, steps)
    H2 = _fd_hessian(vol, m0, 2 * steps)
    drift = np.linalg.norm(H - H2) / np.linalg.norm(H)
    if drift > stability_tol:
        raise AccuracyFailure(f"Hessian unstable under step doubling ({drift:.2%})", estimate=H, error=drift)
    eig = np.linalg.eigvalsh(H)
    lam_max = np.max(np.abs(eig))
    null_dim = int(np.sum(np.abs(eig) < null_tol * lam_max))
    orbit_dim = orbit_tangent_rank(m0, with_scaling=True)
    return HessianReport(eig, null_dim, orbit_dim, H, m0)
