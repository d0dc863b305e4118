import numpy as np
import pytest

from stochhr.grid import SpatialGrid, StateField
from stochhr.model import HRParameters


@pytest.fixture
def grid32():
    return SpatialGrid.from_spec("1:32:1.0")


@pytest.fixture
def params():
    return HRParameters()


def cosine_state(grid, u=-1.0, v=-5.0, z=2.0):
    x = grid.centers()[0]
    return StateField(grid, u + 0.5 * np.cos(np.pi * x), v + np.cos(2 * np.pi * x), z + 0 * x)


ACCEPTANCE_LINES = []


@pytest.fixture
def verdict():
    """Record one acceptance line; printed again in the terminal summary."""
    def record(number, passed, detail):
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed
    return record


def _order(line):
    tag = line.split(":")[0].split()[-1]
    return int(tag.rstrip("ab")), tag


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=_order):
            terminalreporter.write_line(line)
