import numpy as np
import pytest

from gt_market.paths import GbmParams, PathPair, PricePath, generate_index, generate_pair


@pytest.fixture
def gbm_pair():
    return generate_pair(GbmParams(0.2, "martingale", horizon=1.0, dt=1e-4, seed=11), 0.3)


@pytest.fixture
def gbm_index():
    return generate_index(GbmParams(0.2, "martingale", horizon=1.0, dt=1e-4, seed=5))


def make_path(values, times=None):
    values = np.asarray(values, dtype=float)
    times = np.arange(values.size, dtype=float) if times is None else np.asarray(times, dtype=float)
    return PricePath(times, values)


def make_pair(index, stock, times=None):
    index = np.asarray(index, dtype=float)
    times = np.arange(index.size, dtype=float) if times is None else np.asarray(times, dtype=float)
    return PathPair(times, index, np.asarray(stock, dtype=float))


# one line per acceptance criterion, printed after the test session
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
