import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20181211)


class FixedRandom:
    """Stand-in generator whose ``integers`` always returns one value."""

    def __init__(self, value):
        self.value = value

    def integers(self, low, high=None, size=None, **kwargs):
        return np.full(size, self.value, dtype=np.int64)


@pytest.fixture
def fixed_random():
    return FixedRandom


ACCEPTANCE_RESULTS = []


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(number, passed, detail)``."""

    def record(number, passed, detail):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'} ({detail})"
        ACCEPTANCE_RESULTS.append((number, line))
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_RESULTS):
            terminalreporter.write_line(line)
