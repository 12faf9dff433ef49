import numpy as np
import pytest

from rcarstable.innovations import InnovationSpec


@pytest.fixture
def rademacher():
    return InnovationSpec("rademacher")


@pytest.fixture
def zero():
    return InnovationSpec("point_mass", 0.0)


def rel_gap(x, y):
    x, y = np.asarray(x, float), np.asarray(y, float)
    return float(np.max(np.abs(x - y) / np.maximum(np.abs(x), np.abs(y))))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
