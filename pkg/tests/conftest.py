import numpy as np
import pytest

from sioenhance.oracle import random_density


def dense_lambda_max(a):
    """Largest eigenvalue via a dense symmetric eigensolver (independent of power iteration)."""
    return float(np.linalg.eigvalsh(np.asarray(a))[-1])


def random_states(n, dims=(2, 3, 4, 5, 6), seed=0):
    out = []
    for i in range(n):
        d = dims[i % len(dims)]
        rank = 1 + (i // len(dims)) % d
        out.append(random_density(d, rank, seed * 100_003 + i))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
