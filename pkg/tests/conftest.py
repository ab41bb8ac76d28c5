import numpy as np
import pytest

from triadg3.interferometer import bell_matrix

# filled by test_acceptance.py, printed once at the end of the run
ACCEPTANCE_LINES = []


@pytest.fixture
def bell():
    return bell_matrix()


@pytest.fixture
def rng():
    return np.random.default_rng(20171)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
