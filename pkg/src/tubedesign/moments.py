"""Designs, Hankel information matrices and the polynomial moment cone."""

import warnings
from dataclasses import dataclass

import numpy as np

from . import config
from .bases import (
    INF,
    Model,
    as_extended,
    fourier_basis_arrays,
    is_infinite,
    variance_function,
)
from .errors import DesignValidationError, RepresentationFailure

__all__ = [
    "CanonicalRep",
    "Design",
    "HankelMatrix",
    "SingularInformationWarning",
    "as_hankel",
    "canonical_rep",
    "info_matrix",
    "is_in_cone",
    "rescale_weights",
]


class SingularInformationWarning(UserWarning):
    """The information matrix is not positive definite."""


@dataclass(frozen=True)
class Design:
    """A finite design measure.

    Parameters
    ----------
    points : tuple
        Atom locations. On ``"real"`` these are floats or :data:`INF`; on
        ``"fourier"`` they are times in ``(-1/2, 1/2]``.
    weights : tuple of float
        Positive masses. They need not sum to one.
    domain : {"real", "fourier"}
    """

    points: tuple
    weights: tuple
    domain: str = "real"

    def __post_init__(self):
        if self.domain not in ("real", "fourier"):
            raise DesignValidationError(f"domain must be 'real' or 'fourier', got {self.domain!r}")
        pts = tuple(as_extended(p) for p in self.points)
        wts = tuple(float(w) for w in self.weights)
        if len(pts) != len(wts):
            raise DesignValidationError("points and weights differ in length")
        if not pts:
            raise DesignValidationError("a design needs at least one atom")
        for i, w in enumerate(wts):
            if not np.isfinite(w) or w <= 0:
                raise DesignValidationError(f"atom {i}: weight must be positive, got {w}")
        if self.domain == "fourier":
            for i, p in enumerate(pts):
                if p is INF or not -0.5 < p <= 0.5:
                    raise DesignValidationError(f"atom {i}: Fourier time {p} outside (-1/2, 1/2]")
        seen = set()
        for i, p in enumerate(pts):
            if p in seen:
                raise DesignValidationError(f"atom {i}: duplicate location {p}")
            seen.add(p)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)

    @classmethod
    def from_pairs(cls, pairs, domain="real"):
        pts, wts = zip(*pairs)
        return cls(pts, wts, domain)

    @property
    def atoms(self):
        return list(zip(self.points, self.weights))

    @property
    def total_weight(self):
        return float(sum(self.weights))

    def normalized(self):
        """The same design rescaled to a probability measure."""
        tot = self.total_weight
        return Design(self.points, tuple(w / tot for w in self.weights), self.domain)

    def __len__(self):
        return len(self.points)


class HankelMatrix:
    """An ``n x n`` Hankel matrix stored through its moments ``m_0 .. m_{2n-2}``."""

    __slots__ = ("moments",)

    def __init__(self, moments):
        m = np.array(moments, dtype=float).ravel()
        if m.size < 3 or m.size % 2 == 0:
            raise ValueError(f"need an odd number >= 3 of moments, got {m.size}")
        m.setflags(write=False)
        self.moments = m

    @classmethod
    def from_matrix(cls, M, tol=config.HANKEL_SYMMETRY_TOL):
        """Read a dense matrix as Hankel, averaging anti-diagonals.

        Raises ``ValueError`` when the matrix departs from Hankel structure by
        more than ``tol`` relative to its largest entry.
        """
        M = np.asarray(M, dtype=float)
        n = M.shape[0]
        if M.shape != (n, n):
            raise ValueError("expected a square matrix")
        scale = max(np.max(np.abs(M)), np.finfo(float).tiny)
        flipped = np.fliplr(M)
        moments = np.empty(2 * n - 1)
        worst = 0.0
        for k in range(2 * n - 1):
            diag = np.diagonal(flipped, offset=n - 1 - k)
            moments[k] = diag.mean()
            worst = max(worst, np.max(np.abs(diag - moments[k])))
        if worst > tol * scale:
            raise ValueError(f"matrix is not Hankel (deviation {worst / scale:.3g})")
        return cls(moments)

    @property
    def n(self):
        return (self.moments.size + 1) // 2

    @property
    def matrix(self):
        n = self.n
        idx = np.add.outer(np.arange(n), np.arange(n))
        return self.moments[idx]

    def scaled(self, k):
        return HankelMatrix(k * self.moments)

    def __array__(self, dtype=None, copy=None):
        out = self.matrix
        return out if dtype is None else out.astype(dtype)

    def __repr__(self):
        return f"HankelMatrix({np.array2string(self.moments, precision=6, separator=', ')})"

    def __eq__(self, other):
        return isinstance(other, HankelMatrix) and np.array_equal(self.moments, other.moments)

    __hash__ = None


def as_hankel(M):
    """Coerce a :class:`HankelMatrix`, a moment vector or a square matrix."""
    if isinstance(M, HankelMatrix):
        return M
    arr = np.asarray(M, dtype=float)
    if arr.ndim == 1:
        return HankelMatrix(arr)
    return HankelMatrix.from_matrix(arr)


@dataclass(frozen=True, eq=False)
class CanonicalRep:
    """``M = sum_i w_i f_P(x_i) f_P(x_i)^T + w_0 e_n e_n^T`` with ``n - 1`` finite atoms."""

    points: np.ndarray
    weights: np.ndarray
    infinity_weight: float

    @property
    def n(self):
        return self.points.size + 1

    def to_hankel(self):
        n = self.n
        k = np.arange(2 * n - 1)
        m = (self.weights[:, None] * self.points[:, None] ** k).sum(axis=0)
        m[-1] += self.infinity_weight
        return HankelMatrix(m)

    def to_design(self):
        pts = tuple(float(x) for x in self.points) + (INF,)
        wts = tuple(float(w) for w in self.weights) + (float(self.infinity_weight),)
        return Design(pts, wts, "real")


# ---------------------------------------------------------------------------


def info_matrix(model: Model, design: Design):
    """Information matrix ``sum_i w_i f(x_i) f(x_i)^T / sigma^2(x_i)``.

    Returns a :class:`HankelMatrix` for the polynomial model and a dense
    array for the Fourier model. A singular result is returned as is, with a
    :class:`SingularInformationWarning`.
    """
    if model.kind == "fourier":
        if design.domain != "fourier":
            raise DesignValidationError("Fourier model needs a design on the Fourier circle")
        F, _ = fourier_basis_arrays(model.n, np.array(design.points, dtype=float))
        w = np.array(design.weights)
        M = (F * w[:, None]).T @ F
        if not _is_pd(M):
            warnings.warn("information matrix is singular", SingularInformationWarning, stacklevel=2)
        return M

    if design.domain != "real":
        raise DesignValidationError("polynomial model needs a design on the real line")
    n = model.n
    sigma2 = variance_function(n, model.variance)
    m = np.zeros(2 * n - 1)
    k = np.arange(2 * n - 1)
    for x, w in design.atoms:
        mass = w / sigma2(x)
        if is_infinite(x):
            m[-1] += mass
        else:
            m += mass * x**k
    H = HankelMatrix(m)
    if not is_in_cone(H):
        warnings.warn("information matrix is singular", SingularInformationWarning, stacklevel=2)
    return H


def _is_pd(M):
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    tol = config.CONE_PIVOT_TOL * max(np.trace(M), 0.0)
    L = np.zeros_like(M)
    for j in range(n):
        pivot = M[j, j] - L[j, :j] @ L[j, :j]
        if not pivot > tol:
            return False
        L[j, j] = np.sqrt(pivot)
        L[j + 1 :, j] = (M[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    return True


def is_in_cone(M) -> bool:
    """Positive definiteness of the Hankel matrix (pivot floor ``1e-12 * trace``)."""
    return _is_pd(as_hankel(M).matrix)


def canonical_rep(M) -> CanonicalRep:
    """Recover the unique atoms-plus-infinity representation of a cone point.

    The ``n - 1`` finite atoms are the roots of the monic polynomial
    orthogonal to ``1, x, ..., x^{n-2}`` under the moments ``m_0 .. m_{2n-3}``;
    the weights solve the Vandermonde system and the remaining mass of
    ``m_{2n-2}`` sits at infinity.
    """
    H = as_hankel(M)
    if not is_in_cone(H):
        raise RepresentationFailure("matrix is not in the moment cone")
    m = H.moments
    n = H.n
    p = n - 1
    idx = np.add.outer(np.arange(p), np.arange(p))
    rhs = -m[p : 2 * p]
    coeffs = np.linalg.solve(m[idx], rhs)
    roots = np.roots(np.concatenate(([1.0], coeffs[::-1])))
    if np.any(np.abs(roots.imag) >= config.ROOT_IMAG_TOL * (1.0 + np.abs(roots.real))):
        raise RepresentationFailure(f"atom polynomial has non-real roots {roots}")
    x = np.sort(roots.real)
    spread = max(1.0, np.max(np.abs(x)))
    if p > 1 and np.min(np.diff(x)) <= config.ATOM_SEPARATION_TOL * spread:
        raise RepresentationFailure(f"atoms nearly coincide: {x}")
    # least squares over every finite-part moment m_0 .. m_{2n-3}
    V = x[None, :] ** np.arange(2 * p)[:, None]
    w, *_ = np.linalg.lstsq(V, m[: 2 * p], rcond=None)
    if np.any(w <= 0):
        raise RepresentationFailure(f"non-positive atom weights {w}")
    w0 = m[-1] - np.sum(w * x ** (2 * p))
    if w0 <= config.BOUNDARY_MASS_TOL * abs(m[-1]):
        raise RepresentationFailure(f"mass at infinity {w0:.3g} vanishes; matrix is on the cone boundary")
    return CanonicalRep(x, w, float(w0))


def rescale_weights(design: Design, sigma1, sigma2) -> Design:
    """Move a design between variance functions without changing its volume.

    ``q_i = k p_i sigma2(x_i) / sigma1(x_i)`` with ``k`` making the ``q_i`` sum
    to one. The information matrix under ``sigma2`` equals ``k`` times the
    one under ``sigma1``.
    """
    q = np.array([w * sigma2(x) / sigma1(x) for x, w in design.atoms])
    q /= q.sum()
    return Design(design.points, tuple(q), design.domain)
