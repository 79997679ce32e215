"""Multi-indices (exponent vectors) in graded lexicographic order.

Order used everywhere in the package: total degree ascending, then
lexicographically descending within a degree, so that for two variables the
sequence is (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
"""

from __future__ import annotations

import math
from typing import Iterator, Sequence

import numpy as np

MultiIndex = tuple[int, ...]

DEFAULT_LIMIT = 10_000_000


def degree(alpha: Sequence[int]) -> int:
    return int(sum(alpha))


def count_multi_indices(d: int, max_degree: int) -> int:
    """Number of exponent vectors of length ``d`` with total degree <= ``max_degree``."""
    return math.comb(max_degree + d, d)


def homogeneous(d: int, deg: int) -> Iterator[MultiIndex]:
    """All exponent vectors of length ``d`` and total degree exactly ``deg``."""
    if d == 1:
        yield (deg,)
        return
    for first in range(deg, -1, -1):
        for rest in homogeneous(d - 1, deg - first):
            yield (first,) + rest


def enumerate_multi_indices(d: int, max_degree: int, limit: int = DEFAULT_LIMIT) -> list[MultiIndex]:
    if d < 1 or max_degree < 0:
        raise ValueError(f"need d >= 1 and max_degree >= 0, got d={d}, max_degree={max_degree}")
    count = count_multi_indices(d, max_degree)
    if count > limit:
        raise OverflowError(f"{count} multi-indices for d={d}, max_degree={max_degree} exceeds limit {limit}")
    out: list[MultiIndex] = []
    for deg in range(max_degree + 1):
        out.extend(homogeneous(d, deg))
    return out


def multinomial(alpha: Sequence[int]) -> int:
    """|alpha|! / prod(alpha_i!) as an exact integer."""
    total, out = 0, 1
    for a in alpha:
        total += a
        out *= math.comb(total, a)
    return out


def monomials(x: np.ndarray, alphas: Sequence[MultiIndex]) -> np.ndarray:
    """Evaluate ``x**alpha`` for each row of ``x`` and each alpha, with 0**0 = 1.

    ``x`` has shape ``(..., d)``; the result has shape ``(..., len(alphas))``.
    Integer input stays integer so that small-integer computations are exact.
    """
    x = np.asarray(x)
    e = np.asarray(alphas, dtype=np.int64).reshape(len(alphas), x.shape[-1])
    return np.prod(x[..., None, :] ** e, axis=-1)
