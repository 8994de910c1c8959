import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile("default", deadline=None, max_examples=50,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# Volumes of M_v for the reference-table values of v, from the scipy real-line oracle
# (tests/oracles.py::volume_real_line), frozen.
TABLE_VOLUMES = {
    1 / 12: 10.87228705962567,
    1 / 9: 10.696744691624367,
    1 / 6: 10.468760634885966,
    1 / 4: 10.303680155907283,
    1 / 3: 10.260398641295861,
    1 / 2: 10.383393420056873,
}
MIXING_END_VOLUME = 11.073094480509333


def random_cone_point(rng, n, spread=2.0):
    """Moments of ``n - 1`` random atoms plus mass at infinity (interior of the cone)."""
    while True:
        x = np.sort(rng.normal(scale=spread, size=n - 1))
        if n == 2 or np.min(np.diff(x)) > 0.05:
            break
    w = rng.uniform(0.2, 2.0, size=n)
    k = np.arange(2 * n - 1)
    m = (w[:-1, None] * x[:, None] ** k).sum(axis=0)
    m[-1] += w[-1]
    return m, x, w


def random_params(rng, min_det=0.2):
    while True:
        p = rng.normal(size=4)
        if abs(p[0] * p[3] - p[1] * p[2]) > min_det:
            return tuple(p)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def moderate_params(rng):
    """Group element ``A(q, r, 0, 1) A(s, -t, t, s)`` with ``q`` in [0.5, 2] and ``|r| <= 1``."""
    from tubedesign.mobius import MobiusParams, compose

    q = rng.uniform(0.5, 2.0) * rng.choice([-1, 1])
    r = rng.uniform(-1, 1)
    th = rng.uniform(0, np.pi)
    return tuple(compose(MobiusParams(q, r, 0.0, 1.0), MobiusParams(np.cos(th), -np.sin(th), np.sin(th), np.cos(th))))


finite = st.floats(-3, 3, allow_nan=False)


@st.composite
def mobius_params(draw, min_det=0.2):
    p = draw(st.tuples(finite, finite, finite, finite))
    from hypothesis import assume

    assume(abs(p[0] * p[3] - p[1] * p[2]) > min_det)
    return p


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    lines = getattr(acceptance, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
