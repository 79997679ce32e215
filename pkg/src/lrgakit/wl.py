"""Colour refinement: 1-WL on vertices and 2-FWL on ordered vertex pairs.

Colours are dense ids obtained by sorting the distinct signatures of a
round, so ids depend only on the multiset of signatures and never on node
order.  Refining several graphs together shares one such dictionary per
round, which makes their colour ids (and histograms) comparable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .graphs import Graph, build_iso_type_tensor

Histogram = tuple[tuple[int, int], ...]


def histogram(colors: np.ndarray) -> Histogram:
    ids, counts = np.unique(colors, return_counts=True)
    return tuple(zip(ids.tolist(), counts.tolist()))


@dataclass(frozen=True)
class Coloring:
    """Stable vertex colouring; ``history[t]`` is the colouring after round t."""

    colors: np.ndarray
    iterations: int
    history: list[np.ndarray] = field(repr=False)

    @property
    def histogram(self) -> Histogram:
        return histogram(self.colors)

    @property
    def num_colors(self) -> int:
        return len(np.unique(self.colors))


@dataclass(frozen=True)
class PairColoring(Coloring):
    """Stable colouring of ordered pairs; ``colors`` is ``n x n``."""


class Verdict(enum.Enum):
    DISTINGUISHED = "distinguished"
    INDISTINGUISHABLE = "indistinguishable"


@dataclass(frozen=True)
class IsoVerdict:
    verdict: Verdict
    witness: Optional[int]
    histograms: list[tuple[Histogram, Histogram]] = field(repr=False, default_factory=list)

    def __post_init__(self):
        if (self.verdict is Verdict.DISTINGUISHED) != (self.witness is not None):
            raise ValueError("witness round is present exactly when the graphs are distinguished")

    @property
    def distinguished(self) -> bool:
        return self.verdict is Verdict.DISTINGUISHED


def _relabel(signatures: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Map signature rows of several graphs to shared dense ids in sorted-row order."""
    sizes = [len(s) for s in signatures]
    rows = np.concatenate(signatures, axis=0)
    if rows.shape[1] == 0:
        ids = np.zeros(len(rows), dtype=np.int64)
    else:
        _, ids = np.unique(rows, axis=0, return_inverse=True)
        ids = ids.ravel().astype(np.int64)
    return np.split(ids, np.cumsum(sizes)[:-1])


# ---- 1-WL -------------------------------------------------------------------


def _wl1_initial(graphs: Sequence[Graph]) -> list[np.ndarray]:
    return _relabel([g.features for g in graphs])


def _wl1_round(graphs: Sequence[Graph], colors: Sequence[np.ndarray]) -> list[np.ndarray]:
    k = int(max(c.max() for c in colors)) + 1
    sigs = []
    for g, c in zip(graphs, colors):
        counts = g.adjacency @ np.eye(k, dtype=np.int64)[c]
        sigs.append(np.column_stack([c, counts]))
    return _relabel(sigs)


def wl1_step(g: Graph, colors: np.ndarray) -> np.ndarray:
    """One recolouring round: (own colour, multiset of neighbour colours)."""
    return _wl1_round([g], [np.asarray(colors)])[0]


# ---- 2-FWL ------------------------------------------------------------------


def _fwl2_initial(graphs: Sequence[Graph]) -> list[np.ndarray]:
    if len({g.feature_dim for g in graphs}) > 1:
        raise ValueError("graphs must share a node-feature dimension")
    sigs = [build_iso_type_tensor(g).data.reshape(g.n * g.n, -1) for g in graphs]
    return [c.reshape(g.n, g.n) for g, c in zip(graphs, _relabel(sigs))]


def _fwl2_round(colors: Sequence[np.ndarray]) -> list[np.ndarray]:
    k = int(max(c.max() for c in colors)) + 1
    width = max(c.shape[0] for c in colors)
    sigs = []
    for c in colors:
        n = c.shape[0]
        # element k of the multiset of pair (i, j) is (c[i, k], c[k, j])
        elems = c[:, None, :] * k + c.T[None, :, :]
        elems = np.sort(elems, axis=2).reshape(n * n, n)
        if n < width:
            # sentinel padding keeps multisets of different sizes apart
            elems = np.concatenate([np.full((n * n, width - n), -1), elems], axis=1)
        sigs.append(np.column_stack([c.reshape(-1), elems]))
    return [ids.reshape(c.shape) for c, ids in zip(colors, _relabel(sigs))]


def fwl2_step(colors: np.ndarray) -> np.ndarray:
    """One 2-FWL round on an ``n x n`` pair colouring."""
    return _fwl2_round([np.asarray(colors)])[0]


# ---- drivers ----------------------------------------------------------------


def _refine(initial, step, graphs, max_rounds):
    """Refine jointly until the shared partition stops splitting.

    Returns per-graph colour histories and the number of splitting rounds.
    """
    colors = initial(graphs)
    history = [[c] for c in colors]
    classes = len(np.unique(np.concatenate([c.ravel() for c in colors])))
    rounds = 0
    while rounds < max_rounds:
        new = step(graphs, colors)
        new_classes = len(np.unique(np.concatenate([c.ravel() for c in new])))
        if new_classes == classes:
            break
        colors, classes = new, new_classes
        rounds += 1
        for h, c in zip(history, colors):
            h.append(c)
    return history, rounds


def _fwl2_step_graphs(graphs, colors):
    return _fwl2_round(colors)


def wl1_refine(g: Graph, max_rounds: Optional[int] = None) -> Coloring:
    """Stable 1-WL colouring; initial colours are node-feature equality classes."""
    limit = g.n if max_rounds is None else max_rounds
    (history,), rounds = _refine(_wl1_initial, _wl1_round, [g], limit)
    return Coloring(history[-1], rounds, history)


def fwl2_refine(g: Graph, max_rounds: Optional[int] = None) -> PairColoring:
    """Stable 2-FWL colouring of ordered pairs, starting from isomorphism types."""
    limit = g.n * g.n if max_rounds is None else max_rounds
    (history,), rounds = _refine(_fwl2_initial, _fwl2_step_graphs, [g], limit)
    return PairColoring(history[-1], rounds, history)


def iso_test(g1: Graph, g2: Graph, algorithm: str = "fwl2") -> IsoVerdict:
    """Compare colour histograms round by round under a shared dictionary."""
    if algorithm == "wl1":
        initial, step, limit = _wl1_initial, _wl1_round, max(g1.n, g2.n)
    elif algorithm == "fwl2":
        initial, step, limit = _fwl2_initial, _fwl2_step_graphs, max(g1.n, g2.n) ** 2
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}; expected 'wl1' or 'fwl2'")
    (h1, h2), _ = _refine(initial, step, [g1, g2], limit)
    pairs = [(histogram(a), histogram(b)) for a, b in zip(h1, h2)]
    for t, (a, b) in enumerate(pairs):
        if a != b:
            return IsoVerdict(Verdict.DISTINGUISHED, t, pairs)
    return IsoVerdict(Verdict.INDISTINGUISHABLE, None, pairs)
