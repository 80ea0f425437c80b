import math

import pytest

from wigtomo.sampling import sample_dataset
from wigtomo.states import BUNDLED_STATES, StateSpec, make_state

VACUUM_ORIGIN = 1.0 / math.pi
MIXTURE_ORIGIN = -0.6 / math.pi
THERMAL_ORIGIN = 1.0 / (3.0 * math.pi)

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def vacuum():
    return make_state(StateSpec.parse("vacuum"))


@pytest.fixture(scope="session")
def one_photon():
    return make_state(StateSpec.parse("fock_mixture:1=1"))


@pytest.fixture(scope="session")
def mixture():
    return make_state(BUNDLED_STATES["mixture"])


@pytest.fixture(scope="session")
def thermal():
    return make_state(BUNDLED_STATES["thermal"])


@pytest.fixture(scope="session")
def bundled():
    return {name: make_state(spec) for name, spec in BUNDLED_STATES.items()}


@pytest.fixture(scope="session")
def vacuum_2e5(vacuum):
    return sample_dataset(vacuum, 200_000, seed=2024)


@pytest.fixture(scope="session")
def mixture_32e4(mixture):
    return sample_dataset(mixture, 320_000, seed=7)


@pytest.fixture(scope="session")
def thermal_1e5(thermal):
    return sample_dataset(thermal, 100_000, seed=31)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
