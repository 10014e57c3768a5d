import itertools

import numpy as np
import pytest

from hyperembed import Hypergraph


def random_hypergraph(rng, n, p2=0.3, p3=0.05, times=False):
    edges = [e for e in itertools.combinations(range(n), 2) if rng.random() < p2]
    edges += [e for e in itertools.combinations(range(n), 3) if rng.random() < p3]
    ts = rng.random(len(edges)) if times else None
    return Hypergraph.from_edges(n, edges, ts, max_cardinality=3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_h():
    # {1,2},{1,2,3} on nodes 1..3, zero-based here
    return Hypergraph.from_edges(3, [(0, 1), (0, 1, 2)])
