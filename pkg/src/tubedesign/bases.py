"""Regression bases, variance functions and the Fourier/polynomial bridge.

Two regression families are supported:

* Fourier regression on the circle ``t in (-1/2, 1/2]`` with constant
  variance;
* weighted polynomial regression on the extended real line with variance
  ``Q(x)^(n-1)``, ``Q`` a positive quadratic parameterised by a Moebius
  element ``(a, b, c, d)``.

The substitution ``x = tan(pi t)`` links the two through a fixed matrix ``B``
(see :func:`bridge_matrix`).
"""

from dataclasses import dataclass, field
from math import comb, gamma, pi, sqrt
from typing import NamedTuple

import numpy as np

from . import config
from .errors import DegenerateMobiusError, DomainError, InvalidDimensionError

__all__ = [
    "INF",
    "BasisEval",
    "Model",
    "as_extended",
    "bridge_matrix",
    "fourier_basis",
    "fourier_basis_arrays",
    "gram_b_inverse",
    "is_infinite",
    "lambda0",
    "polynomial_basis",
    "polynomial_point",
    "projective_basis_arrays",
    "tangent_map",
    "tangent_map_inverse",
    "variance_function",
    "variance_p",
]


class _PointAtInfinity:
    """The single point at infinity of the extended real line.

    ``+inf`` and ``-inf`` are identified, as on the projective line.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_PointAtInfinity, ())


INF = _PointAtInfinity()


def is_infinite(x) -> bool:
    """True for the :data:`INF` marker and for float infinities."""
    if x is INF:
        return True
    try:
        return bool(np.isinf(x))
    except TypeError:
        return False


def as_extended(x):
    """Map float infinities (either sign) to :data:`INF`, pass reals through as float."""
    if is_infinite(x):
        return INF
    x = float(x)
    if np.isnan(x):
        raise DomainError("NaN is not a point of the extended real line")
    return x


def _check_dim(n):
    if int(n) != n or n < 2:
        raise InvalidDimensionError(f"basis dimension must be an integer >= 2, got {n!r}")
    return int(n)


def _check_params(params):
    a, b, c, d = (float(p) for p in params)
    scale = max(1.0, a * a + b * b + c * c + d * d)
    if abs(a * d - b * c) <= config.DEGENERACY_TOL * scale:
        raise DegenerateMobiusError(f"ad - bc vanishes for parameters {(a, b, c, d)}")
    return a, b, c, d


@dataclass(frozen=True)
class BasisEval:
    """Basis vector ``f`` and its derivative ``g`` at one point."""

    f: np.ndarray
    g: np.ndarray


@dataclass(frozen=True)
class Model:
    """A regression family.

    Parameters
    ----------
    kind : {"fourier", "polynomial"}
    n : int
        Number of basis functions, at least 2.
    variance : tuple of 4 floats
        Moebius parameters of the variance function (polynomial only).
        ``(1, 0, 0, 1)`` gives the canonical ``(1 + x^2)^(n-1)``.
    """

    kind: str
    n: int
    variance: tuple = field(default=(1.0, 0.0, 0.0, 1.0))

    def __post_init__(self):
        if self.kind not in ("fourier", "polynomial"):
            raise ValueError(f"unknown model kind {self.kind!r}")
        object.__setattr__(self, "n", _check_dim(self.n))
        params = _check_params(self.variance)
        object.__setattr__(self, "variance", params)

    @classmethod
    def fourier(cls, n):
        return cls("fourier", n)

    @classmethod
    def polynomial(cls, n, variance=(1.0, 0.0, 0.0, 1.0)):
        return cls("polynomial", n, tuple(variance))

    @property
    def domain(self):
        return "fourier" if self.kind == "fourier" else "real"


# ---------------------------------------------------------------------------
# Fourier basis


def _fourier_terms(n):
    """(frequency multiplier of pi, is_sine) for components after the first."""
    if n % 2:
        terms = [(0, False)]
        for k in range(1, (n - 1) // 2 + 1):
            terms += [(2 * k, True), (2 * k, False)]
    else:
        terms = []
        for j in range(n // 2):
            terms += [(2 * j + 1, False), (2 * j + 1, True)]
    return terms


def fourier_basis_arrays(n, t):
    """Vectorised Fourier basis: returns ``(F, G)`` of shape ``(len(t), n)``."""
    n = _check_dim(n)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    F = np.empty(t.shape + (n,))
    G = np.empty_like(F)
    r2 = sqrt(2.0)
    for j, (k, is_sine) in enumerate(_fourier_terms(n)):
        if k == 0:
            F[..., j] = 1.0
            G[..., j] = 0.0
            continue
        w = k * pi
        if is_sine:
            F[..., j] = r2 * np.sin(w * t)
            G[..., j] = r2 * w * np.cos(w * t)
        else:
            F[..., j] = r2 * np.cos(w * t)
            G[..., j] = -r2 * w * np.sin(w * t)
    return F, G


def fourier_basis(n, t) -> BasisEval:
    """Fourier basis ``f_F(t)`` and its derivative.

    Odd ``n`` uses ``(1, sqrt2 sin 2pi t, sqrt2 cos 2pi t, sqrt2 sin 4pi t, ...)``;
    even ``n`` uses the half-integer frequencies
    ``(sqrt2 cos pi t, sqrt2 sin pi t, sqrt2 cos 3pi t, sqrt2 sin 3pi t, ...)``.
    """
    F, G = fourier_basis_arrays(n, [float(t)])
    return BasisEval(F[0], G[0])


# ---------------------------------------------------------------------------
# Polynomial basis


def polynomial_basis(n, x) -> BasisEval:
    """Monomials ``(1, x, ..., x^(n-1))`` and their derivatives at finite ``x``."""
    n = _check_dim(n)
    if is_infinite(x):
        raise DomainError("the derivative of the polynomial basis is undefined at infinity")
    x = float(x)
    powers = x ** np.arange(n, dtype=float)
    g = np.zeros(n)
    g[1:] = np.arange(1, n) * powers[:-1]
    return BasisEval(powers, g)


def polynomial_point(n, x):
    """``f_P(x)``, with ``f_P(INF) = (0, ..., 0, 1)``."""
    n = _check_dim(n)
    if is_infinite(x):
        e = np.zeros(n)
        e[-1] = 1.0
        return e
    return float(x) ** np.arange(n, dtype=float)


def projective_basis_arrays(n, t):
    """Polynomial basis in angular coordinates.

    With ``theta = pi t`` returns ``F[k] = cos^(n-1-k) sin^k`` and its
    t-derivative. ``F(t)`` is ``f_P(tan(pi t)) cos^(n-1)(pi t)``, so the
    normalised curve is unchanged, and ``t = +-1/2`` gives the point at
    infinity without special cases.
    """
    n = _check_dim(n)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    c = np.cos(pi * t)[..., None]
    s = np.sin(pi * t)[..., None]
    k = np.arange(n)
    F = c ** (n - 1 - k) * s**k
    # d/dt [c^p s^k] = pi (k c^(p+1) s^(k-1) - p c^(p-1) s^(k+1)), p = n-1-k
    p = n - 1 - k
    with np.errstate(divide="ignore", invalid="ignore"):
        term1 = np.where(k > 0, k * c ** (p + 1) * s ** np.maximum(k - 1, 0), 0.0)
        term2 = np.where(p > 0, p * c ** np.maximum(p - 1, 0) * s ** (k + 1), 0.0)
    G = pi * (term1 - term2)
    return F, G


# ---------------------------------------------------------------------------
# Variance functions


def variance_p(n, params, x):
    """``{(b^2+d^2) + 2(ab+cd) x + (a^2+c^2) x^2}^(n-1)``.

    Accepts arrays for ``x``. Positive for every real ``x`` when ``ad != bc``.
    """
    n = _check_dim(n)
    a, b, c, d = _check_params(params)
    x = np.asarray(x, dtype=float)
    q = (b * b + d * d) + 2.0 * (a * b + c * d) * x + (a * a + c * c) * x * x
    out = q ** (n - 1)
    return float(out) if out.ndim == 0 else out


def variance_function(n, params):
    """Callable ``x -> variance_p(n, params, x)``.

    At :data:`INF` the callable returns the leading coefficient
    ``(a^2+c^2)^(n-1)``, i.e. the limit of ``sigma^2(x) / x^(2(n-1))``. This
    pairs with ``f_P(INF) = e_n`` so that information matrices are continuous
    as an atom moves off to infinity.
    """
    n = _check_dim(n)
    a, b, c, d = _check_params(params)
    lead = (a * a + c * c) ** (n - 1)

    def sigma2(x):
        if is_infinite(x):
            return lead
        return variance_p(n, (a, b, c, d), x)

    return sigma2


def lambda0(n, x):
    """``(1 + x^2)^(-(n-1)/2)``."""
    n = _check_dim(n)
    x = np.asarray(x, dtype=float)
    return (1.0 + x * x) ** (-(n - 1) / 2.0)


# ---------------------------------------------------------------------------
# Bridge matrix B


def _pmul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, pi_ in enumerate(p):
        if pi_:
            for j, qj in enumerate(q):
                out[i + j] += pi_ * qj
    return out


def _ppow(p, k):
    out = [1]
    for _ in range(k):
        out = _pmul(out, p)
    return out


def _padd(p, q):
    m = max(len(p), len(q))
    return [(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(m)]


def _row_odd(k, is_sine, m):
    """Integer coefficients of (1+x^2)^m times sin/cos(2 pi k t), x = tan(pi t)."""
    two_x = [0, 2]
    one_minus = [1, 0, -1]
    one_plus = [1, 0, 1]
    acc = [0]
    if is_sine:
        for r in range((k - 1) // 2 + 1):
            term = _pmul(_ppow(two_x, 2 * r + 1), _ppow(one_minus, k - 2 * r - 1))
            acc = _padd(acc, [(-1) ** r * comb(k, 2 * r + 1) * c for c in term])
    else:
        for r in range(k // 2 + 1):
            term = _pmul(_ppow(two_x, 2 * r), _ppow(one_minus, k - 2 * r))
            acc = _padd(acc, [(-1) ** r * comb(k, 2 * r) * c for c in term])
    # sin^j cos^(k-j) of the double angle carries (1+x^2)^-k; m >= k
    return _pmul(acc, _ppow(one_plus, m - k))


def _row_even(k, is_sine, m):
    """Integer coefficients of (1+x^2)^((2m-1)/2) times sin/cos(pi k t), k odd."""
    acc = [0]
    rng = range((k - 1) // 2 + 1) if is_sine else range(k // 2 + 1)
    for r in rng:
        j = 2 * r + 1 if is_sine else 2 * r
        coeff = (-1) ** r * comb(k, j)
        acc = _padd(acc, [0] * j + [coeff])
    return _pmul(acc, _ppow([1, 0, 1], (2 * m - 1 - k) // 2))


def _bridge_integer_rows(n):
    rows = []
    if n % 2:
        m = (n - 1) // 2
        for k, is_sine in _fourier_terms(n):
            if k == 0:
                rows.append((_ppow([1, 0, 1], m), False))
            else:
                rows.append((_row_odd(k // 2, is_sine, m), True))
    else:
        m = n // 2
        for k, is_sine in _fourier_terms(n):
            rows.append((_row_even(k, is_sine, m), True))
    return rows


def bridge_matrix(n):
    """The matrix ``B`` with ``f_F(t) = B f_P(x) lambda0(x)`` for ``x = tan(pi t)``.

    Rows follow the component order of :func:`fourier_basis`. Entries are
    integers, or integers times sqrt(2) for the non-constant components,
    obtained by expanding the multiple-angle formulas exactly.
    """
    n = _check_dim(n)
    B = np.zeros((n, n))
    for i, (coeffs, scaled) in enumerate(_bridge_integer_rows(n)):
        coeffs = coeffs + [0] * (n - len(coeffs))
        if any(coeffs[n:]):
            raise AssertionError("bridge row exceeds the basis degree")
        B[i] = np.array(coeffs[:n], dtype=float) * (sqrt(2.0) if scaled else 1.0)
    return B


def gram_b_inverse(n):
    """Closed form of ``(B^T B)^{-1}``.

    Entry ``(i, j)`` (1-based) is ``Gamma((i+j-1)/2) Gamma(n-(i+j-1)/2) / (pi Gamma(n))``
    for even ``i + j`` and zero otherwise; equivalently the moments
    ``int x^(i+j-2) / (pi (1+x^2)^n) dx``.
    """
    n = _check_dim(n)
    out = np.zeros((n, n))
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if (i + j) % 2 == 0:
                h = (i + j - 1) / 2.0
                out[i - 1, j - 1] = gamma(h) * gamma(n - h) / (pi * gamma(n))
    return out


# ---------------------------------------------------------------------------
# Tangent map


def tangent_map(t):
    """``x = tan(pi t)`` on ``(-1/2, 1/2]``; ``t = 1/2`` maps to :data:`INF`."""
    t = float(t)
    if not -0.5 < t <= 0.5:
        raise DomainError(f"t must lie in (-1/2, 1/2], got {t}")
    if t == 0.5:
        return INF
    return float(np.tan(pi * t))


def tangent_map_inverse(x):
    """Inverse of :func:`tangent_map`; :data:`INF` maps to 1/2."""
    if is_infinite(x):
        return 0.5
    return float(np.arctan(float(x)) / pi)
