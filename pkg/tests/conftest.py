import numpy as np
import pytest

_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES] = []


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def report(request):
    """Record one PASS/FAIL line for an acceptance criterion."""
    def _report(line):
        request.config.stash[_LINES].append(line)
        print(line)
    return _report


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)
