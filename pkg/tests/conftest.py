import numpy as np
import pytest
from hypothesis import settings

from paintdrone.fuzzy.engine import FuzzyController

settings.register_profile("paintdrone", deadline=None, max_examples=60)
settings.load_profile("paintdrone")

GRID = np.linspace(-30.0, 30.0, 61)

# Pass/fail lines from the acceptance suite, echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def fuzzy():
    return FuzzyController.default()


@pytest.fixture(scope="session")
def grid_outputs(fuzzy):
    """infer() over the 61x61 grid, keyed by (i, j) grid indices."""
    return {(i, j): fuzzy(t, p) for i, t in enumerate(GRID) for j, p in enumerate(GRID)}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
