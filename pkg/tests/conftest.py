import pytest

from eponsim.config import RUNNING_EXAMPLE
from eponsim.model import attempt_probability

# REQ length pinned so that omega_{-1} = 318us for the running example.
PINNED_L = 2.5295859677258377e-06


@pytest.fixture
def example():
    return RUNNING_EXAMPLE


@pytest.fixture
def h_example(example):
    return attempt_probability(example)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
