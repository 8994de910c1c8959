"""Simultaneous confidence band thresholds.

Three ways to get the band width ``c`` for a Gaussian linear model with
volume ``V`` of the curve ``gamma_Sigma``:

* the tube approximation ``(V / 2 pi) P(chi2_2 > c^2) = alpha``;
* Naiman's upper bound, which adds ``chi * P(chi2_1 > c^2)``;
* Monte Carlo quantiles of ``max_x |(b_hat - b)^T f(x)| / sqrt(f^T M^-1 f)``.
"""

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import exp, log, pi, sqrt
from typing import NamedTuple

import numpy as np
from scipy.optimize import bisect
from scipy.special import betainc, erfc

from . import config
from .bases import Model, projective_basis_arrays
from .errors import DomainError, FeasibilityWarning
from .moments import Design, as_hankel, info_matrix, is_in_cone
from .volume import volume_polynomial

__all__ = [
    "BandSpec",
    "TABLE_ONE_V",
    "TableRow",
    "design_d_v",
    "max_statistic",
    "naiman_bound",
    "naiman_bound_uniform_direction",
    "naiman_threshold",
    "naiman_threshold_uniform_direction",
    "psi_curve",
    "simulate_quantiles",
    "table_one",
    "thread_count",
    "tube_threshold",
]

TABLE_ONE_V = (1 / 12, 1 / 9, 1 / 6, 1 / 4, 1 / 3, 1 / 2)
_C_MAX = 50.0


@dataclass(frozen=True)
class BandSpec:
    """Band parameters: level ``alpha``, component count ``chi`` and dimension ``n``."""

    alpha: float
    chi: int = 2
    n: int = 3

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")
        if int(self.chi) != self.chi or self.chi < 1:
            raise DomainError(f"chi must be a positive integer, got {self.chi}")
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"n must be an integer >= 2, got {self.n}")


def _check_volume(volume):
    volume = float(volume)
    if not volume > 0 or not np.isfinite(volume):
        raise DomainError(f"volume must be positive, got {volume}")
    return volume


def _check_alpha(alpha):
    alpha = float(alpha)
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    return alpha


def _check_chi(chi):
    if chi < 0 or int(chi) != chi:
        raise DomainError(f"chi must be a non-negative integer, got {chi}")
    return int(chi)


def tube_threshold(volume, alpha):
    """``sqrt(2 log(V / (2 pi alpha)))``; 0 with a warning when ``alpha >= V / (2 pi)``."""
    volume = _check_volume(volume)
    alpha = _check_alpha(alpha)
    ratio = volume / (2 * pi * alpha)
    if ratio <= 1:
        warnings.warn(f"alpha = {alpha} is not below V/2pi = {volume / (2 * pi):.4g}; threshold is 0",
                      FeasibilityWarning, stacklevel=2)
        return 0.0
    return sqrt(2 * log(ratio))


def naiman_bound(volume, chi, c):
    """``(V / 2 pi) exp(-c^2 / 2) + chi * P(chi2_1 > c^2)``."""
    volume = _check_volume(volume)
    chi = _check_chi(chi)
    c = float(c)
    return volume / (2 * pi) * exp(-c * c / 2) + chi * float(erfc(c / sqrt(2.0)))


def naiman_threshold(volume, chi, alpha):
    """Solve ``naiman_bound(V, chi, c) = alpha`` for ``c`` in ``(0, 50]`` by bisection."""
    volume = _check_volume(volume)
    chi = _check_chi(chi)
    alpha = _check_alpha(alpha)
    if naiman_bound(volume, chi, 0.0) <= alpha:
        warnings.warn("Naiman bound is below alpha at c = 0; threshold is 0", FeasibilityWarning, stacklevel=2)
        return 0.0
    return float(bisect(lambda c: naiman_bound(volume, chi, c) - alpha, 0.0, _C_MAX, xtol=1e-14, rtol=1e-15))


def naiman_bound_uniform_direction(volume, chi, n, c):
    """Bound for errors with a uniformly distributed direction (standardised by the norm).

    ``(V / 2 pi) P(Beta(1, (n-2)/2) > c^2) + chi P(Beta(1/2, (n-1)/2) > c^2)``;
    zero for ``c >= 1``.
    """
    volume = _check_volume(volume)
    chi = _check_chi(chi)
    if int(n) != n or n < 3:
        raise DomainError(f"n must be an integer >= 3, got {n}")
    c = float(c)
    if c >= 1:
        return 0.0
    if c <= 0:
        return volume / (2 * pi) + chi
    x = 1 - c * c
    # P(Beta(a, b) > y) = I_{1-y}(b, a)
    return (volume / (2 * pi) * float(betainc((n - 2) / 2, 1.0, x))
            + chi * float(betainc((n - 1) / 2, 0.5, x)))


def naiman_threshold_uniform_direction(volume, chi, n, alpha):
    """Root in ``(0, 1)`` of ``naiman_bound_uniform_direction = alpha``."""
    alpha = _check_alpha(alpha)
    if naiman_bound_uniform_direction(volume, chi, n, 0.0) <= alpha:
        warnings.warn("bound is below alpha at c = 0; threshold is 0", FeasibilityWarning, stacklevel=2)
        return 0.0
    f = lambda c: naiman_bound_uniform_direction(volume, chi, n, c) - alpha  # noqa: E731
    return float(bisect(f, 0.0, 1.0, xtol=1e-15, rtol=1e-15))


# ---------------------------------------------------------------------------
# Monte Carlo


def _inv_sqrt(M):
    lam, V = np.linalg.eigh(np.asarray(M, dtype=float))
    lam = np.maximum(lam, config.SQRT_EIG_FLOOR * lam.max())
    return (V / np.sqrt(lam)) @ V.T


def psi_curve(M, t):
    """Unit vectors ``psi(t) = M^{-1/2} f / |M^{-1/2} f|`` at ``x = tan(pi t)``, one per row."""
    H = as_hankel(M)
    F, _ = projective_basis_arrays(H.n, np.atleast_1d(np.asarray(t, dtype=float)))
    P = F @ _inv_sqrt(H.matrix)
    return P / np.linalg.norm(P, axis=1, keepdims=True)


def _angular_f(n, t):
    # cos^(n-1-k) sin^k without the derivative, for the inner refinement loop
    c, s = np.cos(np.pi * t), np.sin(np.pi * t)
    F = np.empty((t.size, n))
    F[:, 0] = 1.0
    for k in range(1, n):
        F[:, k] = F[:, k - 1] * s
    cp = np.ones_like(c)
    for k in range(n - 1, -1, -1):
        F[:, k] *= cp
        cp = cp * c
    return F


def _golden_max(func, lo, hi, tol):
    """Vectorised golden-section maximisation of ``func`` on per-row brackets."""
    invphi = (sqrt(5.0) - 1) / 2
    a, b = lo.copy(), hi.copy()
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = func(c), func(d)
    while np.max(b - a) > tol:
        left = fc > fd
        # keep [a, d] where f(c) > f(d), else [c, b]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = np.where(left, b - invphi * (b - a), d)
        new_d = np.where(left, c, a + invphi * (b - a))
        f_new = func(np.where(left, new_c, new_d))
        fc, fd = np.where(left, f_new, fd), np.where(left, fc, f_new)
        c, d = new_c, new_d
    x = 0.5 * (a + b)
    return np.maximum(func(x), np.maximum(fc, fd))


def max_statistic(xi, M, grid=config.MC_GRID_SIZE, candidates=config.MC_CANDIDATES,
                  tol=config.MC_GOLDEN_TOL):
    """``max_t |xi^T psi(t)|`` for each row of ``xi``.

    The maximum is located on a uniform ``grid`` over ``(-1/2, 1/2]`` and then
    refined by golden section on the two cells around each of the
    ``candidates`` largest grid-local maxima.
    """
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    H = as_hankel(M)
    R = _inv_sqrt(H.matrix)
    n = H.n
    h = 1.0 / grid
    t = -0.5 + h * np.arange(1, grid + 1)
    Psi = psi_curve(H, t)
    out = np.empty(xi.shape[0])
    block = max(1, 2_000_000 // grid)
    for start in range(0, xi.shape[0], block):
        X = xi[start:start + block]
        Z = np.abs(X @ Psi.T)
        is_peak = (Z >= np.roll(Z, 1, axis=1)) & (Z >= np.roll(Z, -1, axis=1))
        score = np.where(is_peak, Z, -np.inf)
        k = min(candidates, grid)
        idx = np.argpartition(-score, k - 1, axis=1)[:, :k]
        best = np.max(Z, axis=1)
        rows = np.repeat(np.arange(X.shape[0]), k)
        centres = t[idx.ravel()]
        valid = np.isfinite(score[rows, idx.ravel()])
        rows, centres = rows[valid], centres[valid]
        Xr = X[rows]

        def stat(tt):
            P = _angular_f(n, tt) @ R
            return np.abs(np.einsum("ij,ij->i", P, Xr)) / np.linalg.norm(P, axis=1)

        refined = _golden_max(stat, centres - h, centres + h, tol)
        np.maximum.at(best, rows, refined)
        out[start:start + block] = best
    return out


def thread_count():
    """Worker threads for the simulator: ``TUBEDESIGN_THREADS`` or the CPU count."""
    env = os.environ.get("TUBEDESIGN_THREADS")
    if env:
        try:
            value = int(env)
        except ValueError as exc:
            raise DomainError(f"TUBEDESIGN_THREADS must be an integer, got {env!r}") from exc
        if value < 1:
            raise DomainError("TUBEDESIGN_THREADS must be positive")
        return value
    return os.cpu_count() or 1


def simulate_quantiles(M, alphas, reps, seed, threads=None, chunk_size=config.MC_CHUNK_SIZE):
    """Empirical upper-``alpha`` quantiles of the band statistic.

    Replications are split into fixed chunks, each with its own stream spawned
    from ``numpy.random.SeedSequence(seed)``, so the result depends on
    ``(seed, reps)`` only and not on the number of threads.

    Returns
    -------
    list of float
        One quantile per entry of ``alphas``.
    """
    H = as_hankel(M)
    if not is_in_cone(H):
        raise DomainError("information matrix is not positive definite")
    reps = int(reps)
    if reps < 1000:
        raise DomainError(f"reps must be at least 1000, got {reps}")
    alphas = [_check_alpha(a) for a in alphas]
    if not alphas:
        raise DomainError("at least one alpha is required")
    sizes = [chunk_size] * (reps // chunk_size)
    if reps % chunk_size:
        sizes.append(reps % chunk_size)
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    children = root.spawn(len(sizes))

    def run(job):
        size, ss = job
        xi = np.random.default_rng(ss).standard_normal((size, H.n))
        return max_statistic(xi, H)

    workers = threads or thread_count()
    jobs = list(zip(sizes, children))
    if workers == 1:
        parts = [run(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, jobs))
    sample = np.sort(np.concatenate(parts))
    return [float(np.quantile(sample, 1 - a)) for a in alphas]


# ---------------------------------------------------------------------------
# The designs D(v)


def design_d_v(v) -> Design:
    """Three-point design ``{-1/sqrt(v), 0, 1/sqrt(v)}`` with masses ``(p/2, 1-p, p/2)``, ``p = (1+v)/2``.

    Under constant variance its information matrix is ``M_v / (2 (1 + v))``.
    """
    v = float(v)
    if not 0 < v < 1:
        raise DomainError(f"v must lie in (0, 1), got {v}")
    x = 1 / sqrt(v)
    p = (1 + v) / 2
    return Design((-x, 0.0, x), (p / 2, 1 - p, p / 2), "real")


class TableRow(NamedTuple):
    v: float
    volume: float
    empirical: tuple
    theoretical: tuple


def table_one(reps, seed, alphas=(0.1, 0.05), vs=TABLE_ONE_V, threads=None):
    """Volumes, simulated quantiles and tube thresholds for the designs ``D(v)``.

    All rows reuse the same random stream (common random numbers), so the
    differences between rows are estimated much more precisely than the rows
    themselves.
    """
    model = Model.polynomial(3)
    rows = []
    for v in vs:
        M = info_matrix(model, design_d_v(v))
        vol = volume_polynomial(M).volume
        emp = tuple(simulate_quantiles(M, alphas, reps, seed, threads=threads)) if reps else ()
        theo = tuple(tube_threshold(vol, a) for a in alphas)
        rows.append(TableRow(float(v), vol, emp, theo))
    return rows
