"""Matrix-multiplication form of the 2-FWL update.

The multiset of a pair (i, j) is the ``n x 2d`` matrix with rows
``[Y[i, k], Y[k, j]]``.  Its power-sum encoding, for one exponent
``alpha = (beta, gamma)``, is ``sum_k Y[i, k]**beta * Y[k, j]**gamma``, which
is entry (i, j) of the matrix product ``Y**beta @ Y**gamma``.  Computing every
head this way is :func:`fwl2_update_matrix`; :func:`pmp_encode` is the
per-pair brute force it is checked against.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .graphs import PairTensor
from .multiindex import MultiIndex, count_multi_indices, degree, enumerate_multi_indices, monomials

DEFAULT_HEAD_CAP = 10_000

TensorLike = Union[PairTensor, np.ndarray]


def _data(y: TensorLike) -> np.ndarray:
    data = y.data if isinstance(y, PairTensor) else np.asarray(y)
    if data.ndim != 3 or data.shape[0] != data.shape[1]:
        raise ValueError(f"expected an n x n x d tensor, got shape {data.shape}")
    return data


@dataclass(frozen=True)
class Head:
    beta: MultiIndex
    gamma: MultiIndex
    values: np.ndarray = field(repr=False)

    @property
    def degree(self) -> int:
        return degree(self.beta) + degree(self.gamma)


@dataclass(frozen=True)
class EncodedTensor:
    heads: list[Head]
    carried: PairTensor

    def head_stack(self) -> np.ndarray:
        """Heads as an ``n x n x H`` array, in multi-index order."""
        n = self.carried.n
        if not self.heads:
            return np.zeros((n, n, 0))
        return np.stack([h.values for h in self.heads], axis=2)

    def stacked(self) -> np.ndarray:
        """The updated tensor ``[Y, heads]`` of depth ``d + H``."""
        hs = self.head_stack()
        return np.concatenate([self.carried.data.astype(hs.dtype, copy=False), hs], axis=2)


def tensor_power(y: TensorLike, beta: Sequence[int]) -> np.ndarray:
    """Entrywise multi-power: ``out[i, j] = prod_l Y[i, j, l] ** beta[l]`` (0**0 = 1)."""
    data = _data(y)
    if len(beta) != data.shape[2]:
        raise ValueError(f"multi-index of length {len(beta)} for tensor depth {data.shape[2]}")
    return monomials(data, [tuple(beta)])[..., 0]


def pair_multiset(y: TensorLike, i: int, j: int) -> np.ndarray:
    """Rows ``z_k = [Y[i, k], Y[k, j]]`` for k = 0..n-1."""
    data = _data(y)
    return np.concatenate([data[i, :, :], data[:, j, :]], axis=1)


def pmp_encode(z: np.ndarray, max_degree: int) -> np.ndarray:
    """Power-sum multi-symmetric encoding ``[sum_k z_k**alpha for |alpha| <= max_degree]``."""
    z = np.asarray(z)
    if z.ndim != 2:
        raise ValueError("multiset must be a 2-d array of rows")
    alphas = enumerate_multi_indices(z.shape[1], max_degree)
    return monomials(z, alphas).sum(axis=0)


def fwl2_update_matrix(y: TensorLike, max_degree: int, head_cap: int = DEFAULT_HEAD_CAP) -> EncodedTensor:
    """All heads ``Y**beta @ Y**gamma`` with ``|beta| + |gamma| <= max_degree``.

    Heads follow the order of ``enumerate_multi_indices(2 d, max_degree)`` split
    as ``alpha = (beta, gamma)``, so head ``h`` lines up with coordinate ``h``
    of :func:`pmp_encode` on any pair's multiset.
    """
    data = _data(y)
    d = data.shape[2]
    n_heads = count_multi_indices(2 * d, max_degree)
    if n_heads > head_cap:
        raise ValueError(
            f"{n_heads} heads for depth {d} and degree bound {max_degree} exceeds head cap {head_cap}"
        )
    betas = enumerate_multi_indices(d, max_degree)
    powers = np.moveaxis(monomials(data, betas), 2, 0)
    where = {b: k for k, b in enumerate(betas)}
    heads = []
    for alpha in enumerate_multi_indices(2 * d, max_degree):
        beta, gamma = alpha[:d], alpha[d:]
        heads.append(Head(beta, gamma, powers[where[beta]] @ powers[where[gamma]]))
    carried = y if isinstance(y, PairTensor) else PairTensor(data)
    return EncodedTensor(heads, carried)


def pair_partition(vectors: np.ndarray) -> np.ndarray:
    """Label each pair by equality class of its feature vector (labels in sorted-vector order)."""
    n = vectors.shape[0]
    flat = vectors.reshape(n * n, -1)
    _, inverse = np.unique(flat, axis=0, return_inverse=True)
    return inverse.reshape(n, n)
