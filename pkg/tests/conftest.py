import numpy as np
import pytest
from hypothesis import settings

from chargequbit.eigensolver import lowest_states
from chargequbit.fields import make_grid
from chargequbit.potentials import DoubleWellParams, double_well_potential

settings.register_profile("default", deadline=None, derandomize=True)
settings.load_profile("default")

FULL_GRID = make_grid(30, 20, 0.5)
COARSE_GRID = make_grid(7.5, 5.0, 0.5)  # 31 x 21 nodes

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def full_grid():
    return FULL_GRID


@pytest.fixture(scope="session")
def default_spectrum():
    """Default double well, w = 0.2, on the 121 x 81 grid."""
    dw = DoubleWellParams(w=0.2)
    return lowest_states(double_well_potential(dw, FULL_GRID), dw.m_eff, k=4, tol=1e-9)


@pytest.fixture(scope="session")
def small_double_well():
    """A double well that fits a 41 x 31 grid: cheap but with a clean doublet."""
    grid = make_grid(10.0, 7.5, 0.5)
    dw = DoubleWellParams(w=0.2, l=10.0)
    return lowest_states(double_well_potential(dw, grid), dw.m_eff, k=4, tol=1e-10)


def random_zero_boundary(grid, seed):
    v = np.random.default_rng(seed).standard_normal(grid.shape)
    v[0, :] = v[-1, :] = 0.0
    v[:, 0] = v[:, -1] = 0.0
    return v


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
