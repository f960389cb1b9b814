import random

import pytest

from mpfastmm.densemat import mat_from_fn
from mpfastmm.precision import PrecisionContext

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def ctx128():
    return PrecisionContext(128)


@pytest.fixture
def ctx256():
    return PrecisionContext(256)


def int_matrix(rng: random.Random, m: int, n: int, ctx, bound: int = 1024):
    return mat_from_fn(m, n, ctx, lambda i, j: rng.randint(-bound, bound))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
