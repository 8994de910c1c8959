from math import pi, sqrt

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tubedesign import HankelMatrix, MIN_VOLUME, bridge_matrix
from tubedesign.errors import AccuracyFailure, DomainError, InvalidDimensionError
from tubedesign.mobius import act_on_matrix, rep_matrix
from tubedesign.quadrature import adaptive_gk15, periodic_midpoint
from tubedesign.volume import (
    MIXING_MATRIX,
    h_coefficients,
    integrand_n3,
    len_integrand,
    len_of_v,
    lower_bound_integrand,
    lower_bound_len,
    mixing_curve,
    scan_len,
    volume_fourier,
    volume_polynomial,
)

from conftest import MIXING_END_VOLUME, TABLE_VOLUMES, moderate_params, random_cone_point
from oracles import volume_fourier_circle, volume_real_line


def mv(v):
    return HankelMatrix([1, 0, v, 0, 1])


# -- quadrature --------------------------------------------------------------


@pytest.mark.parametrize("func, exact", [(np.cos, 2 * np.sin(0.5)), (lambda t: t**6, 2 * 0.5**7 / 7)])
def test_gk15_smooth(func, exact):
    res = adaptive_gk15(func, -0.5, 0.5, abs_tol=1e-13)
    assert res.value == pytest.approx(exact, abs=1e-13)
    assert res.error <= 1e-13


def test_gk15_peaked_integrand():
    res = adaptive_gk15(lambda t: 1 / (1e-4 + t * t), -0.5, 0.5, abs_tol=1e-9)
    assert res.value == pytest.approx(2 / 1e-2 * np.arctan(0.5 / 1e-2), rel=1e-10)


def test_gk15_reports_failure_with_estimate():
    with pytest.raises(AccuracyFailure) as info:
        adaptive_gk15(lambda t: np.abs(t) ** -0.9, -0.5, 0.5, abs_tol=1e-12, max_depth=6)
    assert info.value.estimate is not None and info.value.error > 0


def test_periodic_midpoint_geometric_convergence():
    f = lambda t: 1 / (2 + np.cos(2 * pi * t))  # noqa: E731
    assert periodic_midpoint(f, -0.5, 0.5, 64) == pytest.approx(1 / sqrt(3), abs=1e-15)


# -- volumes -----------------------------------------------------------------


def test_minimum_volume():
    assert volume_polynomial(mv(1 / 3)).volume == pytest.approx(4 * pi * sqrt(2 / 3), abs=1e-9)
    assert MIN_VOLUME == pytest.approx(10.260398641294913, abs=1e-14)


@pytest.mark.parametrize("v, expected", sorted(TABLE_VOLUMES.items()))
def test_table_volumes_against_oracle(v, expected):
    M = mv(v).scaled(1 / (2 * (1 + v)))
    for closed in (True, False):
        assert volume_polynomial(M, closed_form=closed).volume == pytest.approx(expected, abs=1e-9)
    assert len_of_v(v) == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("v, printed", [(1 / 12, 10.872), (1 / 6, 10.469), (1 / 4, 10.304), (1 / 2, 10.383)])
def test_table_volumes_printed(v, printed):
    assert volume_polynomial(mv(v)).volume == pytest.approx(printed, abs=5e-4)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_generic_path_against_real_line_oracle(n, rng):
    for _ in range(3):
        m, *_ = random_cone_point(rng, n, spread=1.0)
        M = HankelMatrix(m)
        assert volume_polynomial(M, closed_form=False).volume == pytest.approx(
            volume_real_line(M.matrix), rel=1e-8)


def test_periodic_route_agrees(rng):
    for _ in range(5):
        m, *_ = random_cone_point(rng, 4, spread=1.0)
        a = volume_polynomial(m).volume
        b = volume_polynomial(m, method="periodic", nodes=4096).volume
        assert a == pytest.approx(b, rel=1e-9)


def test_fourier_identity_and_two_dimensional():
    assert volume_fourier(np.eye(3)).volume == pytest.approx(MIN_VOLUME, abs=1e-9)
    assert volume_fourier_circle(np.eye(3), 3) == pytest.approx(MIN_VOLUME, abs=1e-9)
    rng = np.random.default_rng(2)
    for _ in range(5):
        X = rng.normal(size=(2, 2))
        assert volume_fourier(X @ X.T + 0.1 * np.eye(2)).volume == pytest.approx(2 * pi, abs=1e-8)
        m = [1.0, rng.normal() * 0.3, 1.0]
        assert volume_polynomial(m).volume == pytest.approx(2 * pi, abs=1e-8)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_fourier_polynomial_bridge(n, rng):
    B = bridge_matrix(n)
    for _ in range(5):
        m, *_ = random_cone_point(rng, n)
        M = HankelMatrix(m).matrix
        assert volume_fourier(B @ M @ B.T).volume == pytest.approx(volume_polynomial(m).volume, rel=1e-7)


@pytest.mark.parametrize("k", [1e-3, 1.0, 1e3])
def test_scale_invariance(k, rng):
    m, *_ = random_cone_point(rng, 3)
    M = HankelMatrix(m)
    assert volume_polynomial(M.scaled(k)).volume == pytest.approx(volume_polynomial(M).volume, rel=1e-9)


@pytest.mark.parametrize("n", [3, 4])
def test_mobius_invariance(n, rng):
    for _ in range(50):
        m, *_ = random_cone_point(rng, n, spread=1.0)
        M = HankelMatrix(m)
        MA = act_on_matrix(rep_matrix(n, moderate_params(rng)), M)
        assert volume_polynomial(MA).volume == pytest.approx(volume_polynomial(M).volume, rel=1e-7)


def test_non_pd_matrix_rejected():
    with pytest.raises(DomainError):
        volume_polynomial([1, 0, 0, 0, 1], closed_form=False)
    with pytest.raises(InvalidDimensionError):
        volume_polynomial([1, 0, 1 / 3, 0, 1 / 5, 0, 1], closed_form=True)


# -- n = 3 closed form -------------------------------------------------------


def _generic_integrand(M, x):
    M = np.asarray(M)
    adj = np.linalg.det(M) * np.linalg.inv(M)
    f = x ** np.arange(3)
    g = np.array([0, 1, 2 * x])
    return np.sqrt((f @ adj @ f) * (g @ adj @ g) - (f @ adj @ g) ** 2) / (f @ adj @ f)


def test_integrand_n3_matches_generic(rng):
    for _ in range(100):
        m, *_ = random_cone_point(rng, 3, spread=1.0)
        x = rng.normal() * 2
        assert integrand_n3(m, x) == pytest.approx(_generic_integrand(HankelMatrix(m).matrix, x), rel=1e-9)


@given(st.floats(0.02, 0.98), st.floats(-20, 20))
def test_integrand_n3_reduces_to_s(v, x):
    assert integrand_n3(mv(v), x) == pytest.approx(float(len_integrand(x, v)), rel=1e-9)


def test_integrand_n3_value_at_zero():
    assert integrand_n3(mv(1 / 3), 0.0) == pytest.approx(sqrt(8 / 3), rel=1e-14)


def test_h_coefficients_shape():
    h1, h0 = h_coefficients(mv(0.2))
    assert h1.shape == h0.shape == (5,)


# -- len(v) ------------------------------------------------------------------


def test_len_at_one_third():
    assert len_of_v(1 / 3) == pytest.approx(MIN_VOLUME, abs=1e-9)
    assert lower_bound_len(1 / 3) == pytest.approx(MIN_VOLUME, abs=1e-12)


def test_lower_bound_closed_form_matches_its_integral():
    for v in (0.05, 0.2, 1 / 3):
        num = 2 * adaptive_gk15(lambda t: pi / np.cos(pi * t) ** 2
                                * lower_bound_integrand(np.tan(pi * t), v), -0.4999999, 0.4999999,
                                abs_tol=1e-11).value
        assert lower_bound_len(v) == pytest.approx(num, rel=1e-6)


def test_lower_bound_below_len():
    for v in np.linspace(0.01, 1 / 3, 40):
        assert lower_bound_len(v) <= len_of_v(v) + 1e-9


@pytest.mark.parametrize("v", [0.05, 0.1, 0.2])
def test_v_duality_of_len(v):
    assert len_of_v((1 - v) / (1 + 3 * v)) == pytest.approx(len_of_v(v), rel=1e-8)


def test_len_unique_minimum():
    grid = np.linspace(0.005, 0.995, 991)
    vals = np.array([len_of_v(v) for v in grid])
    assert abs(grid[np.argmin(vals)] - 1 / 3) <= 1e-3
    far = np.abs(grid - 1 / 3) > 1e-3
    assert np.all(vals[far] - MIN_VOLUME > 0)


@pytest.mark.parametrize("bad", [0.0, 1.0, -0.2])
def test_len_domain(bad):
    with pytest.raises(DomainError):
        len_of_v(bad)


def test_lower_bound_domain():
    with pytest.raises(DomainError):
        lower_bound_len(0.5)


def test_scan_len_rows():
    rows = scan_len([0.2, 0.5])
    assert rows[0][2] is not None and rows[1][2] is None


# -- mixing curve -------------------------------------------------------------


def test_mixing_end_points():
    (c0, v0), (c1, v1) = mixing_curve([0.0, 1.0])
    assert v0 == pytest.approx(MIN_VOLUME, abs=1e-9)
    assert v1 == pytest.approx(MIXING_END_VOLUME, abs=1e-9)
    assert volume_fourier(MIXING_MATRIX).volume == pytest.approx(v1, abs=1e-12)


def test_mixing_curve_not_convex():
    vols = np.array([v for _, v in mixing_curve(np.linspace(0, 1, 101))])
    assert np.min(np.diff(vols, 2)) < 0


def test_mixing_domain():
    with pytest.raises(DomainError):
        mixing_curve([1.5])
