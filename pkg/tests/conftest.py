import numpy as np
import pytest

from liftroute.core import Instance

# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def inst_a():
    """d=1: r1 = (0 -> 1), r2 = (1 -> 0)."""
    return Instance([[0.0], [1.0]], [[1.0], [0.0]])


def random_instance(rng: np.random.Generator, n: int, d: int) -> Instance:
    return Instance(rng.random((n, d)), rng.random((n, d)))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
