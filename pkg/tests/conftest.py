import pytest

from qsampler.combinatorics import ProblemInstance
from qsampler.spectral import build_chi_matrix, orthonormal_eigenbasis


@pytest.fixture(scope="session")
def inst62():
    return ProblemInstance(6, 2)


@pytest.fixture(scope="session")
def basis62(inst62):
    return orthonormal_eigenbasis(inst62)


@pytest.fixture(scope="session")
def chi62(inst62):
    return build_chi_matrix(inst62, normalized=True)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
