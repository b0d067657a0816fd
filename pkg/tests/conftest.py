import math

import numpy as np
import pytest

from cigfht.density import ChannelParams
from cigfht.drift import DriftProfile


@pytest.fixture
def channel():
    return ChannelParams(x0=0.0, ell=5.0, sigma2=2.0)


@pytest.fixture
def sinusoid():
    return DriftProfile.sinusoidal(1.0, 2.0, 2.0 * math.pi)


@pytest.fixture
def step():
    return DriftProfile.step(1.0, 2.0, 1.5)


@pytest.fixture
def ramp():
    return DriftProfile.tabulated(1.0, [(0.0, 2.0), (1.0, -1.0), (2.5, 0.5), (4.0, 3.0)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
