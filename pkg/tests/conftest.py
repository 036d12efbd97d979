import numpy as np
import pytest

from gcl.degree_model import DegreeDistribution

# Filled by test_acceptance; printed once at the end of the run.
ACCEPTANCE_LINES: dict[int, str] = {}

HALF_ONE_THREE = DegreeDistribution.finite({1: 0.5, 3: 0.5})
NEAR_BASE = DegreeDistribution.finite({1: 0.3, 2: 0.6, 3: 0.1})


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
