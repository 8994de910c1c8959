"""Quadrature rules for the tube-volume integrals.

The integrands here are smooth and 1-periodic after the substitution
``x = tan(pi t)``. :func:`adaptive_gk15` is the production rule;
:func:`periodic_midpoint` converges geometrically for such integrands and is
used as an independent check and inside finite-difference schemes, where a
fixed node set keeps the estimate a smooth function of its parameters.
"""

from math import fsum
from typing import NamedTuple

import numpy as np

from . import config
from .errors import AccuracyFailure

# 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1]
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate((-_XGK[:-1], _XGK[::-1]))
KRONROD_WEIGHTS = np.concatenate((_WGK[:-1], _WGK[::-1]))
_ROUNDING = 50 * np.finfo(float).eps

GAUSS_WEIGHTS = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod nodes (counting from the left, 0-based)
GAUSS_WEIGHTS[1::2] = np.concatenate((_WG[:-1], _WG[::-1]))


class QuadResult(NamedTuple):
    value: float
    error: float
    nodes: int


def adaptive_gk15(func, a, b, abs_tol=config.QUAD_ABS_TOL, max_depth=config.QUAD_MAX_DEPTH,
                  initial_panels=4, max_evaluations=config.QUAD_MAX_EVALUATIONS, rel_noise=None):
    """Adaptive 15-point Gauss-Kronrod quadrature by recursive bisection.

    ``func`` must be vectorised. All live panels of one bisection level are
    evaluated in a single call. A panel of width ``h`` is accepted when its
    Kronrod/Gauss discrepancy is below ``abs_tol * h / (b - a)`` or at the
    noise level ``rel_noise`` (default ``50 eps``) of the panel's absolute
    integral; pass a larger ``rel_noise`` when the integrand itself is only
    accurate to that relative level. Accepted
    contributions are summed in left-to-right order with ``math.fsum`` so the
    result does not depend on evaluation order.

    Raises
    ------
    AccuracyFailure
        If panels remain unresolved after ``max_depth`` bisections or
        ``max_evaluations`` integrand calls; the
        exception carries the best estimate and its error bound.
    """
    a = float(a)
    b = float(b)
    noise_level = _ROUNDING if rel_noise is None else max(_ROUNDING, float(rel_noise))
    width = b - a
    edges = np.linspace(a, b, initial_panels + 1)
    left, right = edges[:-1], edges[1:]
    done_left, done_val, done_err = [], [], []
    evaluations = 0
    for depth in range(max_depth + 1):
        mid = 0.5 * (left + right)
        half = 0.5 * (right - left)
        pts = mid[:, None] + half[:, None] * NODES[None, :]
        vals = np.asarray(func(pts.ravel()), dtype=float).reshape(pts.shape)
        evaluations += vals.size
        k = half * (vals @ KRONROD_WEIGHTS)
        g = half * (vals @ GAUSS_WEIGHTS)
        err = np.abs(k - g)
        noise = noise_level * half * (np.abs(vals) @ KRONROD_WEIGHTS)
        converged = err <= np.maximum(abs_tol * (2 * half) / width, noise)
        if not np.all(np.isfinite(vals)):
            raise AccuracyFailure("integrand returned non-finite values", estimate=np.nan, error=np.inf)
        last = depth == max_depth or evaluations + 2 * np.sum(~converged) * NODES.size > max_evaluations
        ok = converged.copy()
        if last:
            ok[:] = True
        done_left.append(left[ok])
        done_val.append(k[ok])
        done_err.append(err[ok])
        if last and not np.all(converged):
            est, bound = _collect(done_left, done_val, done_err)
            raise AccuracyFailure(
                f"quadrature did not converge ({depth} bisections, {evaluations} evaluations)",
                estimate=est, error=bound,
            )
        left, right = left[~ok], right[~ok]
        if left.size == 0:
            break
        m = 0.5 * (left + right)
        left, right = np.concatenate((left, m)), np.concatenate((m, right))
    value, error = _collect(done_left, done_val, done_err)
    return QuadResult(value, error, evaluations)


def _collect(lefts, vals, errs):
    lefts = np.concatenate(lefts)
    vals = np.concatenate(vals)
    errs = np.concatenate(errs)
    order = np.argsort(lefts, kind="stable")
    return fsum(vals[order]), fsum(errs[order])


def periodic_midpoint(func, a, b, nodes):
    """Composite midpoint rule; geometrically convergent for smooth periodic ``func``."""
    h = (b - a) / nodes
    t = a + h * (np.arange(nodes) + 0.5)
    vals = np.asarray(func(t), dtype=float)
    return h * fsum(vals)
