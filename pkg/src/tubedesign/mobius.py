"""The real Moebius group, its n-dimensional representation and its actions.

A group element ``x -> (a x + b) / (c x + d)`` is stored un-normalised as
:class:`MobiusParams`; equality of maps is therefore projective (see
:func:`projectively_equal`). The matrix ``A(a, b, c, d)`` is defined by
``f_P(phi(x)) = lambda(x) A f_P(x)`` with ``lambda(x) = (c x + d)^-(n-1)`` and
is an honest (not projective) representation of GL(2, R).
"""

from math import comb
from typing import NamedTuple

import numpy as np

from . import config
from .bases import INF, _check_dim, _check_params, is_infinite
from .errors import DesignValidationError, NumericalActionFailure
from .moments import Design, HankelMatrix, as_hankel

__all__ = [
    "IDENTITY",
    "Decomposition",
    "MobiusParams",
    "act_on_design",
    "act_on_matrix",
    "apply",
    "compose",
    "decompose",
    "inverse",
    "lambda_factor",
    "projectively_equal",
    "rep_matrix",
]


class MobiusParams(NamedTuple):
    a: float
    b: float
    c: float
    d: float

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    def __call__(self, x):
        return apply(self, x)

    def scaled(self, k):
        return MobiusParams(k * self.a, k * self.b, k * self.c, k * self.d)

    def normalized(self):
        """Scaled so that ``|ad - bc| = 1``."""
        return self.scaled(1.0 / np.sqrt(abs(self.det)))


IDENTITY = MobiusParams(1.0, 0.0, 0.0, 1.0)


def _params(p):
    return MobiusParams(*_check_params(p))


def apply(params, x):
    """``(a x + b) / (c x + d)`` on the extended real line.

    ``INF`` maps to ``a / c`` (or ``INF`` when ``c = 0``) and the pole
    ``-d / c`` maps to ``INF``.
    """
    a, b, c, d = _params(params)
    if is_infinite(x):
        return INF if c == 0 else a / c
    x = float(x)
    den = c * x + d
    if abs(den) <= 4 * np.finfo(float).eps * (abs(c * x) + abs(d)):
        return INF
    return (a * x + b) / den


def compose(outer, inner) -> MobiusParams:
    """Parameters of ``phi(.; outer) o phi(.; inner)``."""
    a2, b2, c2, d2 = outer
    a, b, c, d = inner
    return MobiusParams(a2 * a + b2 * c, a2 * b + b2 * d, c2 * a + d2 * c, c2 * b + d2 * d)


def inverse(params) -> MobiusParams:
    """``(d, -b, -c, a)``: the inverse map, equal to ``det`` times the GL inverse."""
    a, b, c, d = params
    return MobiusParams(d, -b, -c, a)


def projectively_equal(p, q, tol=1e-12):
    """True when ``p`` and ``q`` are proportional, i.e. define the same map."""
    u = np.asarray(p, dtype=float)
    v = np.asarray(q, dtype=float)
    u = u / np.linalg.norm(u)
    v = v / np.linalg.norm(v)
    return min(np.linalg.norm(u - v), np.linalg.norm(u + v)) <= tol


def lambda_factor(n, x, params):
    """``(c x + d)^-(n-1)``."""
    n = _check_dim(n)
    _, _, c, d = params
    return (c * np.asarray(x, dtype=float) + d) ** (-(n - 1))


def rep_matrix(n, params):
    """The ``n x n`` matrix ``A(a, b, c, d)``.

    Entry ``(i, j)`` (1-based) is
    ``sum_l C(i-1, l) C(n-i, j-1-l) a^l b^(i-1-l) c^(j-1-l) d^(n+1-i-j+l)``.
    Complex parameters are accepted (used for complex-step derivatives).
    """
    n = _check_dim(n)
    a, b, c, d = params
    dtype = np.result_type(*(np.asarray(v) for v in params), float)
    A = np.zeros((n, n), dtype=dtype)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            s = 0
            for l_ in range(max(0, i + j - n - 1), min(i - 1, j - 1) + 1):
                s += (
                    comb(i - 1, l_)
                    * comb(n - i, j - 1 - l_)
                    * a**l_
                    * b ** (i - 1 - l_)
                    * c ** (j - 1 - l_)
                    * d ** (n + 1 - i - j + l_)
                )
            A[i - 1, j - 1] = s
    return A


class Decomposition(NamedTuple):
    """``A(a,b,c,d) = k A(q, r, 0, 1) A(s, -t, t, s)``.

    ``q`` carries the sign of ``ad - bc`` and ``branch`` records it. The
    improper form with ``q > 0`` and rotation ``(-s, t, t, s)`` for the
    negative branch is available from :meth:`factors`.
    """

    k: float
    q: float
    r: float
    s: float
    t: float
    branch: int

    def affine(self):
        return MobiusParams(self.q, self.r, 0.0, 1.0)

    def rotation(self):
        return MobiusParams(self.s, -self.t, self.t, self.s)

    def factors(self):
        """(affine, orthogonal) factors with positive ``q``."""
        if self.branch > 0:
            return self.affine(), self.rotation()
        return (
            MobiusParams(-self.q, self.r, 0.0, 1.0),
            MobiusParams(-self.s, self.t, self.t, self.s),
        )

    def recompose(self):
        """Group element (up to scale) that this decomposition represents."""
        return compose(self.affine(), self.rotation())


def decompose(n, params) -> Decomposition:
    """Split a group element into affine and rotation parts."""
    n = _check_dim(n)
    a, b, c, d = _params(params)
    rho = c * c + d * d
    det = a * d - b * c
    root = np.sqrt(rho)
    return Decomposition(
        k=rho ** ((n - 1) / 2.0),
        q=det / rho,
        r=(a * c + b * d) / rho,
        s=d / root,
        t=c / root,
        branch=1 if det > 0 else -1,
    )


def act_on_matrix(A, M) -> HankelMatrix:
    """``A M A^T`` read back as a Hankel matrix."""
    H = as_hankel(M)
    A = np.asarray(A, dtype=float)
    S = A @ H.matrix @ A.T
    try:
        return HankelMatrix.from_matrix(S, tol=config.HANKEL_SYMMETRY_TOL)
    except ValueError as exc:
        raise NumericalActionFailure(str(exc)) from exc


def act_on_design(params, design: Design, variance=IDENTITY):
    """Transport a weighted polynomial design along ``phi(.; params)``.

    Atoms move to ``y_i = phi(x_i)`` and keep their masses; the variance
    parameters become ``variance o phi^{-1}`` (exact GL inverse). The
    information matrix of the result is then exactly ``A M A^T`` where ``M``
    is the information matrix of the input and ``A = rep_matrix(n, params)``.

    Returns
    -------
    (Design, MobiusParams)
    """
    if design.domain != "real":
        raise DesignValidationError("Moebius action needs a design on the real line")
    p = _params(params)
    new_points = tuple(apply(p, x) for x in design.points)
    new_variance = compose(_params(variance), inverse(p)).scaled(1.0 / p.det)
    return Design(new_points, design.weights, "real"), new_variance
