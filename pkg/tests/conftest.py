import pytest

from cmfourfold.cmtype import CMType, shioda_cm_type
from cmfourfold.mtrep import WeightMatrix

# Filled by tests/test_acceptance.py; printed after the run.
ACCEPTANCE_LINES: dict[int, str] = {}

RHO_S = WeightMatrix(((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)))
RHO_M = WeightMatrix(((-1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)))


@pytest.fixture(scope="session")
def shioda():
    return shioda_cm_type()


@pytest.fixture(scope="session")
def twisted():
    return CMType.parse("[9,3]:{0:1,0:2,0:5,1:1}")


@pytest.fixture(scope="session")
def elliptic_flip():
    return CMType.parse("[9,3]:{0:1,0:2,0:4,1:2}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
