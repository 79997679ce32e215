"""Graphs, pair tensors and the permutation action on both."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph with a dense 0/1 adjacency.

    ``features`` is always an ``n x d0`` float matrix; a featureless graph
    carries ``d0 == 0``.
    """

    adjacency: np.ndarray
    features: np.ndarray

    def __init__(self, adjacency, features=None):
        a = np.asarray(adjacency)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {a.shape}")
        n = a.shape[0]
        if n < 1:
            raise ValueError("graph needs at least one node")
        if not np.isin(a, (0, 1)).all():
            raise ValueError("adjacency entries must be 0 or 1")
        a = a.astype(np.int64)
        if not np.array_equal(a, a.T):
            raise ValueError("adjacency must be symmetric")
        if np.any(np.diag(a)):
            raise ValueError("adjacency must have a zero diagonal")
        if features is None:
            x = np.zeros((n, 0))
        else:
            x = np.asarray(features, dtype=float)
            if x.ndim == 1:
                x = x[:, None]
            if x.ndim != 2 or x.shape[0] != n:
                raise ValueError(f"features must have {n} rows, got shape {x.shape}")
        object.__setattr__(self, "adjacency", _frozen(a))
        object.__setattr__(self, "features", _frozen(x))

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.features.shape[1]

    @property
    def edges(self) -> list[tuple[int, int]]:
        i, j = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(i.tolist(), j.tolist()))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return np.array_equal(self.adjacency, other.adjacency) and np.array_equal(
            self.features, other.features
        )

    def __hash__(self):
        return hash((self.adjacency.tobytes(), self.features.tobytes(), self.features.shape))

    def __repr__(self):
        return f"Graph(n={self.n}, edges={len(self.edges)}, d0={self.feature_dim})"

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], features=None) -> "Graph":
        a = np.zeros((n, n), dtype=np.int64)
        for i, j in edges:
            if i == j:
                raise ValueError(f"self loop at node {i}")
            a[i, j] = a[j, i] = 1
        return cls(a, features)

    def to_json(self) -> str:
        doc = {"n": self.n, "edges": [list(e) for e in self.edges]}
        if self.feature_dim:
            doc["features"] = self.features.tolist()
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "Graph":
        doc = json.loads(text)
        return cls.from_edges(doc["n"], doc.get("edges", []), doc.get("features"))


@dataclass(frozen=True, eq=False)
class PairTensor:
    """Dense ``n x n x d`` tensor; ``data[i, j]`` is the vector of ordered pair (i, j)."""

    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim != 3 or self.data.shape[0] != self.data.shape[1]:
            raise ValueError(f"pair tensor must be n x n x d, got {self.data.shape}")
        object.__setattr__(self, "data", _frozen(self.data))

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def depth(self) -> int:
        return self.data.shape[2]

    def channel(self, c: int) -> np.ndarray:
        return self.data[:, :, c]

    def permuted(self, p: "Permutation") -> "PairTensor":
        m = p.mapping
        return PairTensor(self.data[np.ix_(m, m)])


@dataclass(frozen=True, eq=False)
class Permutation:
    """Relabelling of nodes: new node ``i`` is old node ``mapping[i]``.

    As a matrix, ``P[i, mapping[i]] = 1`` so that ``(P X)[i] = X[mapping[i]]``.
    """

    mapping: np.ndarray

    def __init__(self, mapping):
        m = np.asarray(mapping, dtype=np.int64)
        if m.ndim != 1 or not np.array_equal(np.sort(m), np.arange(m.size)):
            raise ValueError("mapping must be a bijection on 0..n-1")
        object.__setattr__(self, "mapping", _frozen(m))

    @property
    def n(self) -> int:
        return self.mapping.size

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(np.arange(n))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "Permutation":
        return cls(rng.permutation(n))

    def matrix(self) -> np.ndarray:
        p = np.zeros((self.n, self.n))
        p[np.arange(self.n), self.mapping] = 1.0
        return p

    def inverse(self) -> "Permutation":
        return Permutation(np.argsort(self.mapping))

    def apply_rows(self, x: np.ndarray) -> np.ndarray:
        """``P @ x`` without forming the matrix."""
        if x.shape[0] != self.n:
            raise ValueError(f"permutation of size {self.n} applied to {x.shape[0]} rows")
        return x[self.mapping]


def build_iso_type_tensor(g: Graph) -> PairTensor:
    """Isomorphism-type tensor ``[I, 1 (x) X, X (x) 1, A]``.

    Entry (i, j) is ``[delta_ij, x_j, x_i, A_ij]``; without features this is
    the depth-2 tensor ``[I, A]``.
    """
    n, d0 = g.n, g.feature_dim
    x = g.features
    eye = np.eye(n)[:, :, None]
    col = np.broadcast_to(x[None, :, :], (n, n, d0))  # x_j
    row = np.broadcast_to(x[:, None, :], (n, n, d0))  # x_i
    adj = g.adjacency[:, :, None].astype(float)
    return PairTensor(np.concatenate([eye, col, row, adj], axis=2))


def apply_permutation(g: Graph, p: Permutation) -> Graph:
    """Return the graph with adjacency ``P A P^T`` and features ``P X``."""
    if p.n != g.n:
        raise ValueError(f"permutation size {p.n} does not match graph size {g.n}")
    m = p.mapping
    return Graph(g.adjacency[np.ix_(m, m)], g.features[m])


def random_graph(n: int, p: float, seed: int, features=None) -> Graph:
    """Seeded Erdos-Renyi G(n, p)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((n, n)) < p, 1)
    return Graph((upper | upper.T).astype(np.int64), features)


# small named graphs used throughout the tests and the CLI


def complete_graph(n: int) -> Graph:
    return Graph(np.ones((n, n), dtype=np.int64) - np.eye(n, dtype=np.int64))


def empty_graph(n: int) -> Graph:
    return Graph(np.zeros((n, n), dtype=np.int64))


def path_graph(n: int, features=None) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)], features)


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def disjoint_union(*graphs: Graph) -> Graph:
    n = sum(g.n for g in graphs)
    d0 = {g.feature_dim for g in graphs}
    if len(d0) != 1:
        raise ValueError("all graphs must share a feature dimension")
    a = np.zeros((n, n), dtype=np.int64)
    off = 0
    for g in graphs:
        a[off : off + g.n, off : off + g.n] = g.adjacency
        off += g.n
    x = np.concatenate([g.features for g in graphs], axis=0)
    return Graph(a, x if x.shape[1] else None)
