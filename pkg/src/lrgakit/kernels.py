"""Explicit feature maps of (products of) homogeneous polynomial kernels.

``phi_homogeneous(x, b)`` lists ``sqrt(multinomial(b; nu)) * x**nu`` over all
``|nu| = b`` so that ``<phi(x), phi(y)> = <x, y>**b``.  A product kernel over
blocks, ``prod_l <x_l, y_l>**beta_l``, has as feature map the row-wise
Kronecker product of the per-block maps.

A node factorization is a block matrix ``X = [X^1, ..., X^k]`` plus index
pairs ``(s_l, t_l)`` with ``Y[:, :, l] = X^{s_l} (X^{t_l})^T``; this gives each
2-FWL head ``Y**beta @ Y**gamma`` a low-rank form computed by
:func:`factorized_fwl_head`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .graphs import Graph, PairTensor
from .multiindex import homogeneous, multinomial

DEFAULT_FEATURE_CAP = 1_000_000


@lru_cache(maxsize=None)
def _homogeneous_table(dim: int, deg: int) -> tuple[np.ndarray, np.ndarray]:
    nus = list(homogeneous(dim, deg))
    coef = np.sqrt(np.array([float(multinomial(nu)) for nu in nus]))
    return np.array(nus, dtype=np.int64).reshape(len(nus), dim), coef


def homogeneous_dim(dim: int, deg: int) -> int:
    return math.comb(deg + dim - 1, dim - 1)


def phi_homogeneous(x: np.ndarray, degree: int) -> np.ndarray:
    """Feature map of ``<x, y>**degree``; works on a vector or row-wise on a matrix."""
    if degree < 0:
        raise ValueError("degree must be non-negative")
    x = np.asarray(x, dtype=float)
    exps, coef = _homogeneous_table(x.shape[-1], degree)
    return coef * np.prod(x[..., None, :] ** exps, axis=-1)


@dataclass(frozen=True)
class FeatureMapSpec:
    beta: tuple[int, ...]
    block_dims: tuple[int, ...]

    def __post_init__(self):
        if len(self.beta) != len(self.block_dims):
            raise ValueError("one exponent per block is required")
        if any(d < 1 for d in self.block_dims):
            raise ValueError("block dimensions must be positive")

    @property
    def output_dim(self) -> int:
        return math.prod(homogeneous_dim(d, b) for b, d in zip(self.beta, self.block_dims))


def phi_product(blocks: Sequence[np.ndarray], beta: Sequence[int], cap: int = DEFAULT_FEATURE_CAP) -> np.ndarray:
    """Feature map of ``prod_l <x_l, y_l>**beta_l``; the first block varies slowest."""
    if len(blocks) != len(beta):
        raise ValueError(f"{len(blocks)} blocks but {len(beta)} exponents")
    blocks = [np.asarray(b, dtype=float) for b in blocks]
    spec = FeatureMapSpec(tuple(int(b) for b in beta), tuple(b.shape[-1] for b in blocks))
    if spec.output_dim > cap:
        raise ValueError(f"feature map dimension {spec.output_dim} exceeds cap {cap}")
    lead = blocks[0].shape[:-1] if blocks else ()
    out = np.ones(lead + (1,))
    for block, b in zip(blocks, spec.beta):
        f = phi_homogeneous(block, b)
        out = (out[..., :, None] * f[..., None, :]).reshape(lead + (-1,))
    return out


@dataclass(frozen=True, eq=False)
class NodeFactorization:
    """Block node features whose block outer products reproduce a pair tensor."""

    x: np.ndarray
    block_dims: tuple[int, ...]
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.x.ndim != 2 or self.x.shape[1] != sum(self.block_dims):
            raise ValueError(f"x has shape {self.x.shape}, blocks sum to {sum(self.block_dims)}")
        k = len(self.block_dims)
        for s, t in self.pairs:
            if not (0 <= s < k and 0 <= t < k):
                raise ValueError(f"block pair ({s}, {t}) out of range for {k} blocks")
            if self.block_dims[s] != self.block_dims[t]:
                raise ValueError(f"blocks {s} and {t} have different widths")

    @property
    def n(self) -> int:
        return self.x.shape[0]

    def blocks(self) -> list[np.ndarray]:
        edges = np.cumsum((0,) + tuple(self.block_dims))
        return [self.x[:, a:b] for a, b in zip(edges[:-1], edges[1:])]

    def source_blocks(self) -> list[np.ndarray]:
        bl = self.blocks()
        return [bl[s] for s, _ in self.pairs]

    def target_blocks(self) -> list[np.ndarray]:
        bl = self.blocks()
        return [bl[t] for _, t in self.pairs]

    def reconstruct(self) -> PairTensor:
        chans = [s @ t.T for s, t in zip(self.source_blocks(), self.target_blocks())]
        return PairTensor(np.stack(chans, axis=2))

    def permuted(self, mapping) -> "NodeFactorization":
        return NodeFactorization(self.x[np.asarray(mapping)], self.block_dims, self.pairs)


def exact_factorization(y: PairTensor) -> NodeFactorization:
    """``X = [I, Y_1^T, ..., Y_d^T]`` with pairs ``(0, l)``: ``I @ Y_l = Y_l``."""
    n, d = y.n, y.depth
    x = np.concatenate([np.eye(n)] + [y.channel(c).T for c in range(d)], axis=1)
    return NodeFactorization(x, (n,) * (d + 1), tuple((0, c + 1) for c in range(d)))


def iso_type_factorization(g: Graph) -> NodeFactorization:
    """Exact factorization of ``[I, 1 (x) X, X (x) 1, A]``.

    Blocks are ``[1, X_1, ..., X_d0, I, A]``: the identity channel pairs ``I``
    with itself, ``x_j`` pairs the ones column with ``X_l``, ``x_i`` the
    reverse, and adjacency pairs ``I`` with ``A``.
    """
    n, d0 = g.n, g.feature_dim
    x = np.concatenate([np.ones((n, 1)), g.features, np.eye(n), g.adjacency.astype(float)], axis=1)
    dims = (1,) + (1,) * d0 + (n, n)
    eye_b, adj_b = 1 + d0, 2 + d0
    pairs = [(eye_b, eye_b)]
    pairs += [(0, 1 + c) for c in range(d0)]
    pairs += [(1 + c, 0) for c in range(d0)]
    pairs += [(eye_b, adj_b)]
    return NodeFactorization(x, dims, tuple(pairs))


@dataclass(frozen=True)
class FactorizedHead:
    left: np.ndarray
    right: np.ndarray
    product: np.ndarray


def psi_map(f: NodeFactorization, beta: Sequence[int], cap: int = DEFAULT_FEATURE_CAP) -> np.ndarray:
    """Row-wise feature map on the source blocks."""
    return phi_product(f.source_blocks(), beta, cap)


def phi_map(f: NodeFactorization, beta: Sequence[int], cap: int = DEFAULT_FEATURE_CAP) -> np.ndarray:
    """Row-wise feature map on the target blocks."""
    return phi_product(f.target_blocks(), beta, cap)


def factorized_fwl_head(
    f: NodeFactorization, beta: Sequence[int], gamma: Sequence[int], cap: int = DEFAULT_FEATURE_CAP
) -> FactorizedHead:
    """Low-rank form ``[psi_b (phi_b^T psi_g), phi_g]`` of the head ``Y**beta @ Y**gamma``.

    The association order keeps every intermediate at ``n x feature_dim``.
    """
    if len(beta) != len(f.pairs) or len(gamma) != len(f.pairs):
        raise ValueError(f"multi-indices must have length {len(f.pairs)}")
    psi_b, phi_b = psi_map(f, beta, cap), phi_map(f, beta, cap)
    psi_g, phi_g = psi_map(f, gamma, cap), phi_map(f, gamma, cap)
    left = psi_b @ (phi_b.T @ psi_g)
    return FactorizedHead(left, phi_g, left @ phi_g.T)
