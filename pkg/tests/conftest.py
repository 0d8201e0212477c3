import numpy as np
import pytest

from phtune import gain_for_zeta, linearize, planar_manipulator


@pytest.fixture(scope="session")
def arm():
    return planar_manipulator()


@pytest.fixture(scope="session")
def arm_lin0(arm):
    return linearize(arm, np.zeros((2, 2)))


@pytest.fixture(scope="session")
def arm_crit(arm_lin0):
    return gain_for_zeta(arm_lin0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20200712)


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE_LINES
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def demo_cases():
    from phtune.study import run_study
    return run_study()
