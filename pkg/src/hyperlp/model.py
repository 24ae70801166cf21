"""Two-block symmetric hypergraph stochastic block model.

Hyperedges are sorted d-multisets (repeated vertices allowed).  Each one is
present independently with probability ``p`` when all of its vertices share a
block and ``q`` otherwise.  Blocks are fixed: the first ``n/2`` vertices form
block 0.
"""
from dataclasses import dataclass, field
from math import comb

import numpy as np

from hyperlp._multiset import enumerate_multisets, multiset_rank, n_multisets
from hyperlp.errors import InvalidArgumentError, ResourceLimitError

#: Default cap on the number of multisets the sampler may enumerate.
DEFAULT_MULTISET_BUDGET = 30_000_000


@dataclass(frozen=True)
class HsbmParams:
    """Model tuple ``(n, d, p, q)``."""

    n: int
    d: int
    p: float
    q: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise InvalidArgumentError(f"n must be an integer >= 2, got {self.n}")
        if self.n % 2:
            raise InvalidArgumentError(f"n must be even, got {self.n}")
        if int(self.d) != self.d or self.d < 2:
            raise InvalidArgumentError(f"d must be an integer >= 2, got {self.d}")
        if not (0.0 <= self.q <= self.p <= 1.0):
            raise InvalidArgumentError(
                f"need 0 <= q <= p <= 1, got p={self.p}, q={self.q}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "q", float(self.q))

    @property
    def degenerate(self):
        """True for q = 0, p = q or p = 1 (outside the open model range)."""
        return self.q == 0.0 or self.p == self.q or self.p == 1.0


class BlockLabels:
    """Balanced 0/1 block assignment; ``labels[v]`` is the block of ``v``."""

    __slots__ = ("_labels",)

    def __init__(self, labels):
        arr = np.array(labels, dtype=np.int8).ravel()
        n = arr.size
        if n == 0 or n % 2:
            raise InvalidArgumentError("labels must have even, positive length")
        if not np.all((arr == 0) | (arr == 1)):
            raise InvalidArgumentError("labels must be 0 or 1")
        if int(arr.sum()) != n // 2:
            raise InvalidArgumentError("blocks must have exactly n/2 vertices each")
        arr.flags.writeable = False
        self._labels = arr

    @classmethod
    def halves(cls, n):
        """First ``n/2`` vertices in block 0, the rest in block 1."""
        if n % 2:
            raise InvalidArgumentError(f"n must be even, got {n}")
        return cls(np.repeat([0, 1], n // 2))

    @property
    def array(self):
        return self._labels

    @property
    def n(self):
        return self._labels.size

    def block(self, i):
        """Sorted vertex indices of block ``i``."""
        return np.flatnonzero(self._labels == i)

    def __len__(self):
        return self._labels.size

    def __getitem__(self, v):
        return int(self._labels[v])

    def __eq__(self, other):
        return isinstance(other, BlockLabels) and np.array_equal(self._labels, other._labels)

    def __hash__(self):
        return hash(self._labels.tobytes())

    def __repr__(self):
        return f"BlockLabels(n={self.n})"


@dataclass(frozen=True, eq=False)
class Hypergraph:
    """Order-``d`` hypergraph stored as a weighted list of sorted multisets.

    ``edges`` is an ``(m, d)`` int array with ascending rows and no duplicate
    rows; ``weights`` holds one positive weight per row.  The adjacency tensor
    is implied: every ordering of a row carries that row's weight.
    """

    n: int
    d: int
    edges: np.ndarray
    weights: np.ndarray
    labels: BlockLabels = field(default=None)

    def __post_init__(self):
        edges = np.array(self.edges, dtype=np.int32).reshape(-1, self.d)
        weights = np.array(self.weights, dtype=np.float64).ravel()
        if weights.size != edges.shape[0]:
            raise InvalidArgumentError("one weight per edge required")
        if edges.size and (edges.min() < 0 or edges.max() >= self.n):
            raise InvalidArgumentError("edge vertex out of range")
        if np.any(np.diff(edges, axis=1) < 0):
            raise InvalidArgumentError("edge rows must be sorted ascending")
        if np.any(weights <= 0) or not np.all(np.isfinite(weights)):
            raise InvalidArgumentError("edge weights must be positive and finite")
        if edges.shape[0] > 1:
            ranks = multiset_rank(edges, self.n)
            if np.unique(ranks).size != ranks.size:
                raise InvalidArgumentError("duplicate edge multiset")
        labels = self.labels if self.labels is not None else BlockLabels.halves(self.n)
        if labels.n != self.n:
            raise InvalidArgumentError("labels length does not match n")
        edges.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "labels", labels)

    @property
    def num_edges(self):
        return self.edges.shape[0]

    def relabel(self, perm):
        """Vertex ``v`` becomes ``perm[v]``; labels move with the vertices."""
        perm = np.asarray(perm)
        edges = np.sort(perm[self.edges], axis=1)
        labels = np.empty(self.n, dtype=np.int8)
        labels[perm] = self.labels.array
        return Hypergraph(self.n, self.d, edges, self.weights, BlockLabels(labels))

    def scaled(self, c):
        return Hypergraph(self.n, self.d, self.edges, self.weights * c, self.labels)


def _check_tuple(params, labels, vertices):
    vertices = np.asarray(vertices)
    if vertices.shape != (params.d,):
        raise InvalidArgumentError(f"expected {params.d} vertices, got shape {vertices.shape}")
    if vertices.min() < 0 or vertices.max() >= params.n:
        raise InvalidArgumentError(f"vertex out of range [0, {params.n})")
    return vertices


def edge_probability(params, labels, vertices):
    """Inclusion probability of the multiset ``vertices``."""
    vertices = _check_tuple(params, labels, vertices)
    blocks = labels.array[vertices]
    return params.p if np.all(blocks == blocks[0]) else params.q


def sample_hsbm(params, seed, max_multisets=DEFAULT_MULTISET_BUDGET):
    """Draw a hypergraph; a pure function of ``(params, seed)``."""
    total = n_multisets(params.n, params.d)
    if total > max_multisets:
        raise ResourceLimitError("multiset enumeration", total, max_multisets)
    labels = BlockLabels.halves(params.n)
    candidates = enumerate_multisets(params.n, params.d)
    # Sorted rows with the first n/2 vertices in block 0: a row is within-block
    # iff its smallest and largest vertex fall on the same side.
    half = params.n // 2
    inside = (candidates[:, -1] < half) | (candidates[:, 0] >= half)
    prob = np.where(inside, params.p, params.q)
    rng = np.random.default_rng(seed)
    keep = rng.random(total) < prob
    edges = candidates[keep]
    return Hypergraph(params.n, params.d, edges, np.ones(edges.shape[0]), labels)


def expected_edge_count(params):
    """Expected number of sampled edges."""
    half = params.n // 2
    inside = 2 * comb(half + params.d - 1, params.d)
    total = comb(params.n + params.d - 1, params.d)
    return params.p * inside + params.q * (total - inside)


@dataclass(frozen=True)
class ExpectedBlockDegrees:
    """Expected clique-expansion row sums restricted to a target block."""

    d00: float
    d01: float
    d10: float
    d11: float


def expected_block_degrees(params):
    half = params.n / 2
    scale = half ** (params.d - 1)
    same = scale * (params.p + (2 ** (params.d - 2) - 1) * params.q)
    cross = scale * 2 ** (params.d - 2) * params.q
    return ExpectedBlockDegrees(d00=same, d01=cross, d10=cross, d11=same)


def write_hypergraph(h, path):
    """Write ``n d`` then one ``w v_1 ... v_d`` line per edge to a path or stream."""
    lines = [f"{h.n} {h.d}\n"]
    lines += ["%.17g " % w + " ".join(str(int(v)) for v in row) + "\n"
              for w, row in zip(h.weights, h.edges)]
    if hasattr(path, "write"):
        path.writelines(lines)
        return
    with open(path, "w") as fh:
        fh.writelines(lines)


def read_hypergraph(path):
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise InvalidArgumentError("first line must be 'n d'")
        n, d = int(header[0]), int(header[1])
        weights, edges = [], []
        for lineno, line in enumerate(fh, start=2):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != d + 1:
                raise InvalidArgumentError(f"line {lineno}: expected {d + 1} fields")
            weights.append(float(parts[0]))
            edges.append(sorted(int(v) for v in parts[1:]))
    return Hypergraph(n, d, np.array(edges, dtype=np.int32).reshape(-1, d), np.array(weights))
