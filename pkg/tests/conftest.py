import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from hilljunction.potential import constant, fourier, kronig_penney, piecewise  # noqa: E402
from hilljunction.spectrum import band_edges  # noqa: E402


@pytest.fixture(scope="session")
def kp():
    return kronig_penney()


@pytest.fixture(scope="session")
def kp_band(kp):
    return band_edges(kp, 3)


@pytest.fixture(scope="session")
def mathieu():
    return fourier([(1, 2.0, 0.0)], even_hint=True)


@pytest.fixture(scope="session")
def even_barrier():
    return piecewise([0.0, 0.25, 0.75], [0.0, 10.0, 0.0], even_hint=True)


@pytest.fixture(scope="session")
def even_well():
    return piecewise([0.0, 0.25, 0.75], [4.0, 0.0, 4.0], even_hint=True)


@pytest.fixture(scope="session")
def kp_traces(kp, kp_band):
    """Gap 1 and gap 2 trajectories over t in [0, 2], shared by several tests."""
    from hilljunction.dislocation import trace_trajectories
    grid = np.linspace(0.0, 2.0, 201)
    return {n: trace_trajectories(kp, n, grid, kp_band) for n in (1, 2)}


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[0][1:])):
            terminalreporter.write_line(line)
