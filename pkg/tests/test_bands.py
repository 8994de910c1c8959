from math import pi, sqrt

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tubedesign import HankelMatrix, Model, info_matrix
from tubedesign.bands import (
    BandSpec,
    design_d_v,
    max_statistic,
    naiman_bound,
    naiman_bound_uniform_direction,
    naiman_threshold,
    naiman_threshold_uniform_direction,
    psi_curve,
    simulate_quantiles,
    table_one,
    thread_count,
    tube_threshold,
)
from tubedesign.errors import DomainError, FeasibilityWarning
from tubedesign.optimal import m_v


@pytest.mark.parametrize(
    "volume, alpha, expected",
    [(10.260, 0.1, 2.3635), (10.260, 0.05, 2.6405), (10.872, 0.1, 2.3879)],
)
def test_tube_threshold_examples(volume, alpha, expected):
    assert tube_threshold(volume, alpha) == pytest.approx(expected, abs=5e-4)


def test_tube_threshold_solves_equation():
    c = tube_threshold(10.26, 0.07)
    assert 10.26 / (2 * pi) * np.exp(-c * c / 2) == pytest.approx(0.07, rel=1e-13)


def test_tube_threshold_infeasible():
    with pytest.warns(FeasibilityWarning):
        assert tube_threshold(1.0, 0.5) == 0.0


@given(st.floats(7, 100), st.floats(0.001, 0.1), st.floats(0.001, 0.1))
def test_tube_threshold_monotone(volume, a1, a2):
    if a1 < a2:
        assert tube_threshold(volume, a1) > tube_threshold(volume, a2)
    assert tube_threshold(volume * 1.5, a1) > tube_threshold(volume, a1)


def test_naiman_chi_zero_is_tube():
    assert naiman_threshold(10.26, 0, 0.05) == pytest.approx(tube_threshold(10.26, 0.05), abs=1e-12)


def test_naiman_example():
    c = naiman_threshold(10.260, 2, 0.05)
    assert c >= tube_threshold(10.260, 0.05)
    assert naiman_bound(10.260, 2, c) == pytest.approx(0.05, abs=1e-14)


def test_naiman_bound_decreasing():
    cs = np.linspace(0.5, 50, 500)
    vals = [naiman_bound(10.0, 2, c) for c in cs]
    nz = [v for v in vals if v > 0]
    assert np.all(np.diff(nz) < 0)


@given(st.floats(7, 100), st.integers(1, 4), st.floats(0.001, 0.2))
def test_naiman_threshold_conservative(volume, chi, alpha):
    assert naiman_threshold(volume, chi, alpha) >= tube_threshold(volume, alpha) - 1e-12


def test_naiman_infeasible():
    with pytest.warns(FeasibilityWarning):
        assert naiman_threshold(1e-3, 0, 0.5) == 0.0


def test_uniform_direction_bound():
    V = 10.0
    assert naiman_bound_uniform_direction(V, 2, 3, 1e-12) == pytest.approx(V / (2 * pi) + 2, rel=1e-9)
    assert naiman_bound_uniform_direction(V, 2, 3, 1.0) == 0.0
    for c in (0.2, 0.5, 0.9):
        tail_1_half = np.sqrt(1 - c * c)    # P(Beta(1, 1/2) > c^2)
        tail_half_1 = 1 - c                 # P(Beta(1/2, 1) > c^2)
        assert naiman_bound_uniform_direction(V, 2, 3, c) == pytest.approx(
            V / (2 * pi) * tail_1_half + 2 * tail_half_1, rel=1e-12)
    cs = np.linspace(0.01, 0.99, 99)
    assert np.all(np.diff([naiman_bound_uniform_direction(V, 2, 5, c) for c in cs]) < 0)
    c = naiman_threshold_uniform_direction(V, 2, 4, 0.05)
    assert naiman_bound_uniform_direction(V, 2, 4, c) == pytest.approx(0.05, abs=1e-12)


def test_band_spec_validation():
    BandSpec(0.05)
    for kwargs in ({"alpha": 0}, {"alpha": 0.1, "chi": 0}, {"alpha": 0.1, "n": 1}):
        with pytest.raises(DomainError):
            BandSpec(**kwargs)


def test_design_d_v_information():
    for v in (1 / 12, 1 / 3, 1 / 2):
        H = info_matrix(Model.polynomial(3), design_d_v(v))
        np.testing.assert_allclose(H.matrix, m_v(v).matrix / (2 * (1 + v)), atol=1e-15)


def test_psi_curve_unit_and_standardised(rng):
    t = rng.uniform(-0.5, 0.5, 50)
    P = psi_curve(m_v(0.2), t)
    np.testing.assert_allclose(np.linalg.norm(P, axis=1), 1, atol=1e-14)


def test_grid_maximiser_beats_dense_grid(rng):
    M = m_v(0.2)
    xi = rng.normal(size=(100, 3))
    refined = max_statistic(xi, M)
    dense = np.abs(xi @ psi_curve(M, np.linspace(-0.5, 0.5, 20_000)).T).max(axis=1)
    assert np.all(refined >= dense - 1e-8)


def test_max_statistic_bounded_by_norm(rng):
    xi = rng.normal(size=(200, 3))
    assert np.all(max_statistic(xi, m_v(1 / 3)) <= np.linalg.norm(xi, axis=1) + 1e-12)


def test_simulator_determinism():
    a = simulate_quantiles(m_v(0.25), [0.1, 0.05], 25_000, seed=7, threads=1)
    b = simulate_quantiles(m_v(0.25), [0.1, 0.05], 25_000, seed=7, threads=3)
    assert a == b
    c = simulate_quantiles(m_v(0.25), [0.1, 0.05], 25_000, seed=8, threads=1)
    assert c != a


def test_simulator_scale_invariant():
    a = simulate_quantiles(m_v(0.25), [0.1], 5_000, seed=3)
    b = simulate_quantiles(HankelMatrix(m_v(0.25).moments * 7.5), [0.1], 5_000, seed=3)
    assert a == pytest.approx(b, rel=1e-12)


def test_simulator_validation():
    with pytest.raises(DomainError):
        simulate_quantiles(m_v(0.2), [0.1], 999, seed=1)
    with pytest.raises(DomainError):
        simulate_quantiles(m_v(0.2), [1.5], 1000, seed=1)
    with pytest.raises(DomainError):
        simulate_quantiles([1, 0, 0, 0, 1], [0.1], 1000, seed=1)


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("TUBEDESIGN_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("TUBEDESIGN_THREADS", "zero")
    with pytest.raises(DomainError):
        thread_count()


def test_table_one_without_simulation():
    rows = table_one(0, seed=1)
    assert [r.v for r in rows] == pytest.approx([1 / 12, 1 / 9, 1 / 6, 1 / 4, 1 / 3, 1 / 2])
    assert rows[4].theoretical == pytest.approx((2.3635, 2.6405), abs=5e-4)
    assert all(r.empirical == () for r in rows)
