import pytest

from digictl.polytf import Domain, Polynomial, TransferFunction
from digictl.xform import bilinear_z_to_w, zoh_discretize

T = 0.1

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def plant_s():
    return TransferFunction(Polynomial([0.1533]), Polynomial([0.0, 0.7809, 1.0]), Domain.s())


@pytest.fixture(scope="session")
def plant_z(plant_s):
    return zoh_discretize(plant_s, T)


@pytest.fixture(scope="session")
def plant_w(plant_z):
    return bilinear_z_to_w(plant_z)


@pytest.fixture(scope="session")
def printed_plant():
    return TransferFunction.from_descending([0.0007471, 0.0007279], [1.0, -1.925, 0.9249], Domain.z(T))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
