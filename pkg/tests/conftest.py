import numpy as np
import pytest

from bootperc import GraphParams, ProcessParams, graph_from_pairs, sample_gnp
from bootperc.rng import substream


@pytest.fixture
def triangle():
    return graph_from_pairs(3, np.array([1, 1, 2]), np.array([2, 3, 3]))


@pytest.fixture
def star5():
    # center 1, leaves 2..5
    return graph_from_pairs(5, np.array([1, 1, 1, 1]), np.array([2, 3, 4, 5]))


@pytest.fixture
def empty6():
    return graph_from_pairs(6, np.array([], dtype=np.int32), np.array([], dtype=np.int32))


@pytest.fixture
def path6():
    u = np.array([1, 2, 3, 4, 5])
    return graph_from_pairs(6, u, u + 1)


def random_instance(seed, n_lo=5, n_hi=60, r_choices=(2, 3)):
    """Small random (graph, r, A(0)) instance for equivalence-style tests."""
    rng = substream(seed, "test-instance")
    n = int(rng.integers(n_lo, n_hi + 1))
    p = float(rng.choice(np.arange(0.05, 0.55, 0.05)))
    r = int(rng.choice(r_choices))
    graph = sample_gnp(GraphParams(n, p, int(rng.integers(0, 2**63))))
    a = int(rng.integers(0, n + 1))
    seeds = np.sort(rng.choice(n, size=a, replace=False).astype(np.int32) + 1)
    return ProcessParams(graph, r, seeds)
