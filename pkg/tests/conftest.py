import itertools

import numpy as np
import pytest

from cubeinf import cube

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def maj3():
    return cube.majority(3)


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


def brute_coefficients(values, n):
    """p_hat(S) = 2^-n sum_x p(x) prod_{i in S} x_i, straight from the definition."""
    points = list(itertools.product([1, -1], repeat=n))  # tuple index i -> x_{i+1}
    out = np.zeros(1 << n)
    for S in range(1 << n):
        acc = 0.0
        for x in points:
            idx = sum(1 << i for i, xi in enumerate(x) if xi == -1)
            chi = np.prod([x[i] for i in range(n) if (S >> i) & 1]) if S else 1
            acc += values[idx] * chi
        out[S] = acc / (1 << n)
    return out


def brute_l1_influence(values, n, i):
    total = 0.0
    for x in range(1 << n):
        total += abs(values[x] - values[x ^ (1 << (i - 1))]) / 2
    return total / (1 << n)


def brute_l2_influence(values, n, i):
    total = 0.0
    for x in range(1 << n):
        total += ((values[x] - values[x ^ (1 << (i - 1))]) / 2) ** 2
    return total / (1 << n)
