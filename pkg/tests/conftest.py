import numpy as np
import pytest

from moyal_phase import DEFAULT_GRID, GridSpec1D
from moyal_phase.weyl import REFERENCE_BOX, build_fock_rep, build_vonneumann_A


@pytest.fixture(scope="session")
def grid():
    return DEFAULT_GRID


@pytest.fixture(scope="session")
def small_grid():
    return GridSpec1D(64, -8.0, 8.0)


@pytest.fixture(scope="session")
def rep64():
    return build_fock_rep(64)


@pytest.fixture(scope="session")
def rep48():
    return build_fock_rep(48)


@pytest.fixture(scope="session")
def A48(rep48):
    return build_vonneumann_A(rep48, REFERENCE_BOX)


def phase_mesh(F):
    """(X, P) broadcastable mesh of a Wigner function's grid."""
    return F.phase_grid.x_grid.points[:, None], F.phase_grid.p_grid.points[None, :]


def gaussian_wigner(X, P, x0, p0, a):
    return np.exp(-(a * (X - x0)) ** 2 - ((P - p0) / a) ** 2) / np.pi


# one "criterion N: PASS|FAIL ..." line per acceptance criterion, filled by test_acceptance
ACCEPTANCE: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
