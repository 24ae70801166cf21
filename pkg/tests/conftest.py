import itertools

import numpy as np
import pytest

from hyperlp.model import Hypergraph


def dense_tensor(h):
    """Dense order-d adjacency with every ordering of every edge filled in."""
    A = np.zeros((h.n,) * h.d)
    for row, w in zip(h.edges, h.weights):
        for perm in set(itertools.permutations(row.tolist())):
            A[perm] = w
    return A


def random_hypergraph(n, d, m, seed, weighted=False):
    rng = np.random.default_rng(seed)
    rows = {tuple(sorted(rng.integers(0, n, size=d).tolist())) for _ in range(m)}
    rows = sorted(rows)
    weights = rng.uniform(0.5, 2.0, len(rows)) if weighted else np.ones(len(rows))
    return Hypergraph(n, d, np.array(rows, dtype=np.int32).reshape(-1, d), weights)


@pytest.fixture
def single_edge():
    return Hypergraph(4, 3, [[1, 2, 3]], [1.0])
