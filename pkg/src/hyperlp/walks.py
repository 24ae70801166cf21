"""Clique-expansion, tensor and hybrid (CET) random walks on hypergraphs.

All walks carry unnormalized path-count mass and divide by its 1-norm after
every step.  The walks are linear, so this leaves every landing probability
unchanged while keeping long horizons finite.
"""
import csv
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import factorial

import numpy as np

from hyperlp._backend import kernels
from hyperlp._multiset import multiplicity_factor, multiset_rank, n_multisets
from hyperlp.errors import InvalidArgumentError, ResourceLimitError, WalkExtinctionError
from hyperlp.model import BlockLabels, Hypergraph

#: Default cap on tensor-walk state entries (ordered (d-1)-tuples).
DEFAULT_STATE_BUDGET = 1 << 24

SEED_MODES = ("single", "uniform", "explicit")


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Dense symmetric clique-expansion adjacency (self-loops allowed)."""

    n: int
    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        if w.shape != (self.n, self.n):
            raise InvalidArgumentError(f"weights must be {self.n}x{self.n}")
        if np.any(w < 0):
            raise InvalidArgumentError("weights must be nonnegative")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True, eq=False)
class LandingProfile:
    """Row ``k`` holds the landing probabilities after ``k`` steps."""

    x: np.ndarray

    @property
    def K(self):
        return self.x.shape[0] - 1

    @property
    def n(self):
        return self.x.shape[1]

    def features(self, k_min=1, k_max=None):
        """Per-vertex LP vectors over steps ``k_min..k_max``: shape ``(n, m)``."""
        k_max = self.K if k_max is None else k_max
        if not 0 <= k_min <= k_max <= self.K:
            raise InvalidArgumentError(f"step range {k_min}..{k_max} outside 0..{self.K}")
        return self.x[k_min:k_max + 1].T

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["k", "v", "x"])
            for k, row in enumerate(self.x):
                for v, val in enumerate(row):
                    writer.writerow([k, v, "%.17g" % val])


@dataclass(frozen=True)
class SeedSpec:
    """How a walk is started.

    ``single`` draws the seed vertex (CE) or each tuple entry (tensor)
    uniformly from block 0 using ``seed``; ``uniform`` starts from the expected
    single-seed state; ``explicit`` uses ``vertices`` as given.
    """

    mode: str = "single"
    vertices: tuple = None
    seed: int = None

    def __post_init__(self):
        if self.mode not in SEED_MODES:
            raise InvalidArgumentError(f"seed mode must be one of {SEED_MODES}")
        if self.mode == "explicit":
            if not self.vertices:
                raise InvalidArgumentError("explicit seed needs vertices")
            object.__setattr__(self, "vertices", tuple(int(v) for v in self.vertices))


def make_seed_state(seed, n, labels, order=1, rng=None):
    """Initial unnormalized state for a walk over ordered ``order``-tuples.

    ``order=1`` is the clique-expansion walk (a length-``n`` vector); tensor
    walks of hyperedge order ``d`` use ``order=d-1`` and a flat vector of length
    ``n**order`` indexed base ``n`` with the first tuple entry most significant.
    """
    size = n ** order
    y = np.zeros(size)
    if seed.mode == "explicit":
        verts = seed.vertices
        if len(verts) != order:
            raise InvalidArgumentError(f"explicit seed needs {order} vertices, got {len(verts)}")
        if min(verts) < 0 or max(verts) >= n:
            raise InvalidArgumentError(f"seed vertex outside [0, {n})")
        y[_encode(verts, n)] = 1.0
        return y
    block0 = labels.block(0)
    if seed.mode == "single":
        if rng is None:
            rng = np.random.default_rng(seed.seed)
        verts = rng.choice(block0, size=order, replace=True)
        y[_encode(verts, n)] = 1.0
        return y
    # uniform: expectation of the single-seed indicator
    grids = np.meshgrid(*([block0] * order), indexing="ij")
    idx = np.zeros(grids[0].shape, dtype=np.int64)
    for g in grids:
        idx = idx * n + g
    y[idx.ravel()] = (2.0 / n) ** order
    return y


def _encode(verts, n):
    idx = 0
    for v in verts:
        idx = idx * n + int(v)
    return idx


def clique_expand(h):
    """Clique-expansion adjacency: sum of the tensor over all but the last two slots.

    An edge of weight ``w`` and multiplicity profile ``m`` puts
    ``w (d-2)! / prod(m_x!)`` on every ordered pair of distinct positions.
    """
    n, d = h.n, h.d
    if h.num_edges == 0:
        return WeightedGraph(n, np.zeros((n, n)))
    per_pair = h.weights * factorial(d - 2) / multiplicity_factor(h.edges)
    edges = h.edges.astype(np.int64)
    flat = np.zeros(n * n)
    for i in range(d):
        for j in range(d):
            if i != j:
                flat += np.bincount(edges[:, i] * n + edges[:, j], weights=per_pair,
                                    minlength=n * n)
    return WeightedGraph(n, flat.reshape(n, n))


def partial_clique_expand(h, target_order):
    """Replace each edge by the complete order-``target_order`` hypergraph on it.

    Every distinct sorted sub-multiset of an edge receives that edge's weight;
    contributions from different edges add up.
    """
    if not 2 <= target_order < h.d:
        raise InvalidArgumentError(f"target order must be in [2, {h.d}), got {target_order}")
    n, t = h.n, target_order
    if h.num_edges == 0:
        return Hypergraph(n, t, np.zeros((0, t), dtype=np.int32), np.zeros(0), h.labels)
    positions = list(combinations(range(h.d), t))
    ranks = np.stack([multiset_rank(h.edges[:, list(c)], n) for c in positions], axis=1)
    # one contribution per distinct sub-multiset of each parent
    order = np.argsort(ranks, axis=1)
    sorted_ranks = np.take_along_axis(ranks, order, axis=1)
    fresh = np.ones_like(sorted_ranks, dtype=bool)
    fresh[:, 1:] = sorted_ranks[:, 1:] != sorted_ranks[:, :-1]
    parent = np.broadcast_to(np.arange(h.num_edges)[:, None], ranks.shape)[fresh]
    which = np.take_along_axis(np.broadcast_to(np.arange(len(positions)), ranks.shape),
                               order, axis=1)[fresh]
    flat_ranks = sorted_ranks[fresh]
    uniq, first, inverse = np.unique(flat_ranks, return_index=True, return_inverse=True)
    weights = np.bincount(inverse, weights=h.weights[parent], minlength=uniq.size)
    pos = np.array(positions)[which[first]]
    rows = np.take_along_axis(h.edges[parent[first]], pos, axis=1)
    return Hypergraph(n, t, rows, weights, h.labels)


def ce_landing_profile(g, seed, K, labels=None, rng=None):
    """Landing probabilities of the walk ``y <- y A`` on a weighted graph."""
    if K < 0:
        raise InvalidArgumentError("K must be >= 0")
    if labels is None:
        labels = BlockLabels.halves(g.n)
    y = make_seed_state(seed, g.n, labels, 1, rng)
    x = np.empty((K + 1, g.n))
    x[0] = y / y.sum()
    for k in range(1, K + 1):
        y = y @ g.weights
        total = y.sum()
        if not total > 0:
            raise WalkExtinctionError(k)
        y /= total
        x[k] = y
    return LandingProfile(x)


@dataclass(frozen=True, eq=False)
class CompletionIndex:
    """Sparse form of the adjacency tensor for stepping tuple states.

    For each sorted ``(d-1)``-multiset key, ``vertex[indptr[key]:indptr[key+1]]``
    lists the vertices completing it to an edge, with the edge weight.
    ``state_key[s]`` is the key of ordered tuple ``s``.
    """

    n: int
    order: int
    state_key: np.ndarray
    indptr: np.ndarray
    vertex: np.ndarray
    weight: np.ndarray


@lru_cache(maxsize=4)
def _state_keys(n, order):
    idx = np.arange(n ** order, dtype=np.int64)
    digits = np.empty((idx.size, order), dtype=np.int64)
    rest = idx.copy()
    for i in range(order - 1, -1, -1):
        digits[:, i] = rest % n
        rest //= n
    digits.sort(axis=1)
    keys = multiset_rank(digits, n)
    keys.flags.writeable = False
    return keys


def completion_index(h, max_states=DEFAULT_STATE_BUDGET):
    n, d = h.n, h.d
    order = d - 1
    n_states = n ** order
    if n_states > max_states:
        raise ResourceLimitError("tensor walk state", n_states, max_states)
    keys, verts, weights = [], [], []
    for i in range(d):
        # removing equal values gives the same key; keep the first copy only
        mask = np.ones(h.num_edges, dtype=bool) if i == 0 else h.edges[:, i] != h.edges[:, i - 1]
        rows = h.edges[mask]
        keys.append(multiset_rank(np.delete(rows, i, axis=1), n))
        verts.append(rows[:, i])
        weights.append(h.weights[mask])
    keys = np.concatenate(keys)
    perm = np.argsort(keys, kind="stable")
    n_keys = n_multisets(n, order)
    indptr = np.zeros(n_keys + 1, dtype=np.int64)
    np.cumsum(np.bincount(keys, minlength=n_keys), out=indptr[1:])
    return CompletionIndex(
        n=n,
        order=order,
        state_key=_state_keys(n, order),
        indptr=indptr,
        vertex=np.ascontiguousarray(np.concatenate(verts)[perm], dtype=np.int32),
        weight=np.ascontiguousarray(np.concatenate(weights)[perm], dtype=np.float64),
    )


def tensor_step(index, y):
    """One unnormalized step: ``y'[v_2..v_d] = sum_{v_1} A[v_1..v_d] y[v_1..v_{d-1}]``."""
    out = np.zeros_like(y)
    kernels.tensor_step(y, index.state_key, index.indptr, index.vertex, index.weight,
                        index.n, index.n ** (index.order - 1), out)
    return out


def _position_marginal(y, n, order):
    # average over tuple positions of the per-position vertex marginal
    x = np.zeros(n)
    for i in range(order):
        x += y.reshape(n ** i, n, n ** (order - 1 - i)).sum(axis=(0, 2))
    return x / order


def tensor_landing_profile(h, seed, K, rng=None, index=None, max_states=DEFAULT_STATE_BUDGET):
    """Landing probabilities of the order-``(d-1)`` tensor walk on ``h``.

    Rows ``k >= 1`` marginalize the state onto its last entry.  Row 0 is the
    normalized count of each vertex over all tuple positions of the start state,
    so a seed tuple ``(1, 2)`` gives mass 1/2 to each of vertices 1 and 2.
    """
    if K < 0:
        raise InvalidArgumentError("K must be >= 0")
    if index is None:
        index = completion_index(h, max_states)
    n, order = h.n, h.d - 1
    y = make_seed_state(seed, n, h.labels, order, rng)
    x = np.empty((K + 1, n))
    first = _position_marginal(y, n, order)
    x[0] = first / first.sum()
    for k in range(1, K + 1):
        y = tensor_step(index, y)
        total = y.sum()
        if not total > 0:
            raise WalkExtinctionError(k)
        y /= total
        x[k] = y.reshape(-1, n).sum(axis=0)
    return LandingProfile(x)
