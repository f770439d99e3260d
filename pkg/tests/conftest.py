import numpy as np
import pytest

from laprep.eigen import ground_truth_representation
from laprep.envs import make_grid_env


@pytest.fixture(scope="session")
def gridroom():
    return make_grid_env("gridroom")


@pytest.fixture(scope="session")
def gridmaze():
    return make_grid_env("gridmaze")


@pytest.fixture(scope="session")
def room_gt(gridroom):
    return ground_truth_representation(gridroom.graph(), 10)


@pytest.fixture(scope="session")
def maze_gt(gridmaze):
    return ground_truth_representation(gridmaze.graph(), 10)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
