import numpy as np
import pytest

from pcg_mub.grid import GaussianSpec, Grid, make_gaussian

SIGMA = 520.0


@pytest.fixture(scope="session")
def beam():
    return GaussianSpec(SIGMA)


@pytest.fixture(scope="session")
def wide_grid():
    # +/-5000 um, 4 um spacing
    return Grid(2500, -5000.0 + 2.0, 4.0)


@pytest.fixture(scope="session")
def gaussian_wf(wide_grid, beam):
    return make_gaussian(wide_grid, beam)


@pytest.fixture
def rng():
    return np.random.default_rng(20240617)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
