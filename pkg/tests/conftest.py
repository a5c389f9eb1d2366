import numpy as np
import pytest

from motifboot.graphs import Graph


def gnp(n: int, p: float, seed: int) -> Graph:
    """Seeded Erdos-Renyi graph used as a generic test fixture."""
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((n, n)) < p, 1)
    return Graph(upper | upper.T)


def cycle(n: int) -> Graph:
    adj = np.zeros((n, n), dtype=bool)
    for i in range(n):
        adj[i, (i + 1) % n] = adj[(i + 1) % n, i] = True
    return Graph(adj)


def complete(n: int) -> Graph:
    adj = ~np.eye(n, dtype=bool)
    return Graph(adj)


def path(n: int) -> Graph:
    adj = np.zeros((n, n), dtype=bool)
    for i in range(n - 1):
        adj[i, i + 1] = adj[i + 1, i] = True
    return Graph(adj)


@pytest.fixture
def k4():
    return complete(4)


@pytest.fixture
def c4():
    return cycle(4)


@pytest.fixture
def c5():
    return cycle(5)


@pytest.fixture
def c6():
    return cycle(6)
