"""Random node features and the one-layer node factorization they enable.

With ``R`` an ``n x d`` matrix of i.i.d. zero-mean, unit-variance entries,
``(1/d) R R^T ~ I`` and ``(1/d) A R R^T ~ A``, so the message-passing output
``d^{-1/2} [A R, R]`` is an approximate node factorization of ``[I, A]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .graphs import Graph, Permutation
from .kernels import NodeFactorization

# stream id reserved for drawing the check permutation
_PERM_STREAM = 2**32 - 1

PRNG_ALGORITHM = "numpy.random.Generator(PCG64) seeded by SeedSequence([seed, trial])"


@dataclass(frozen=True)
class RandomFeatureConfig:
    """``gaussian`` uses ``variance``; ``uniform`` draws from ``[-bound/2, bound/2]``.

    ``variance=None`` for the Gaussian means ``1/d``.
    """

    d: int
    distribution: str = "gaussian"
    variance: Optional[float] = None
    bound: float = 2 * math.sqrt(3.0)
    seed: int = 0

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("feature dimension must be positive")
        if self.distribution not in ("gaussian", "uniform"):
            raise ValueError(f"unknown distribution {self.distribution!r}")
        if self.distribution == "gaussian" and self.variance is not None and self.variance <= 0:
            raise ValueError("variance must be positive")
        if self.distribution == "uniform" and self.bound <= 0:
            raise ValueError("uniform bound must be positive")

    @property
    def entry_variance(self) -> float:
        if self.distribution == "uniform":
            return self.bound**2 / 12
        return 1.0 / self.d if self.variance is None else self.variance

    @classmethod
    def unit_uniform(cls, d: int, seed: int = 0) -> "RandomFeatureConfig":
        """Uniform on ``[-sqrt 3, sqrt 3]``: bounded with unit variance."""
        return cls(d, "uniform", bound=2 * math.sqrt(3.0), seed=seed)


def trial_rng(seed: int, trial: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


def sample_features(n: int, cfg: RandomFeatureConfig, trial: int = 0) -> np.ndarray:
    if n < 1:
        raise ValueError("need at least one node")
    rng = trial_rng(cfg.seed, trial)
    if cfg.distribution == "uniform":
        half = cfg.bound / 2
        return rng.uniform(-half, half, size=(n, cfg.d))
    return rng.normal(scale=math.sqrt(cfg.entry_variance), size=(n, cfg.d))


def message_passing_layer(a: np.ndarray, r: np.ndarray) -> np.ndarray:
    """``d^{-1/2} [A R, R]``."""
    a = np.asarray(a, dtype=float)
    r = np.asarray(r, dtype=float)
    if a.shape != (r.shape[0], r.shape[0]):
        raise ValueError(f"adjacency {a.shape} incompatible with features {r.shape}")
    return np.concatenate([a @ r, r], axis=1) / math.sqrt(r.shape[1])


def rgnn_factorization(a: np.ndarray, r: np.ndarray) -> NodeFactorization:
    """The layer output viewed as blocks ``[AR, R] / sqrt d`` approximating ``[I, A]``."""
    d = r.shape[1]
    return NodeFactorization(message_passing_layer(a, r), (d, d), ((1, 1), (0, 1)))


@dataclass(frozen=True)
class FactorizationDeviation:
    gram_dev: float
    adj_dev: float


def factorization_error(a: np.ndarray, r: np.ndarray, variance: float = 1.0) -> FactorizationDeviation:
    """``max |RR^T/(d v) - I|`` and ``||A RR^T/(d v) - A||_F``.

    ``variance`` is the per-entry variance ``v`` of ``r``; the unit default
    matches the concentration argument.
    """
    a = np.asarray(a, dtype=float)
    r = np.asarray(r, dtype=float)
    gram = (r @ r.T) / (r.shape[1] * variance)
    gram_dev = float(np.abs(gram - np.eye(r.shape[0])).max())
    adj_dev = float(np.linalg.norm(a @ gram - a))
    return FactorizationDeviation(gram_dev, adj_dev)


def hoeffding_failure_bound(n: int, d: int, t: float, bound: float) -> float:
    """Union bound ``2 n^2 exp(-2 d t^2 / M^4)`` on ``P(max |RR^T/d - I| >= t)``."""
    return 2 * n * n * math.exp(-2 * d * t * t / bound**4)


def required_dimension(n: int, xi: float, delta_fail: float, m_prime: float = 1.0) -> float:
    """``M' n^6 / xi^2 * ln(2 n^2 / delta)``; ``M'`` is an unstated constant (default 1)."""
    if xi <= 0 or not 0 < delta_fail < 1 or m_prime <= 0:
        raise ValueError("need xi > 0, 0 < delta_fail < 1 and m_prime > 0")
    return m_prime * n**6 / xi**2 * math.log(2 * n * n / delta_fail)


def extended_factorization(g: Graph, r: np.ndarray) -> np.ndarray:
    """``[1, X, R, A R]`` for a graph with (possibly zero-width) node features."""
    r = np.asarray(r, dtype=float)
    if r.shape[0] != g.n:
        raise ValueError(f"random features have {r.shape[0]} rows for {g.n} nodes")
    return np.concatenate([np.ones((g.n, 1)), g.features, r, g.adjacency @ r], axis=1)


Forward = Callable[[np.ndarray, np.ndarray], np.ndarray]


def expectation_equivariance_check(
    forward: Forward,
    g: Graph,
    cfg: RandomFeatureConfig,
    n_trials: int = 1,
    perm: Optional[Permutation] = None,
) -> float:
    """Monte-Carlo estimate of ``||E_R f(P[X,R]) - P E_R f([X,R])||_inf``.

    ``forward(h, a)`` maps node inputs ``h = [X, R]`` and adjacency ``a`` to
    node outputs.  Trials are paired: the sample used on the permuted graph is
    ``P R`` (equal in law to ``R``), so an exactly equivariant forward yields 0
    up to rounding after a single trial.
    """
    if perm is None:
        rng = trial_rng(cfg.seed, _PERM_STREAM)
        mapping = rng.permutation(g.n)
        if g.n > 1 and np.array_equal(mapping, np.arange(g.n)):
            mapping = np.roll(mapping, 1)
        perm = Permutation(mapping)
    m = perm.mapping
    pa = g.adjacency[np.ix_(m, m)]
    lhs = rhs = 0.0
    for t in range(n_trials):
        h = np.concatenate([g.features, sample_features(g.n, cfg, t)], axis=1)
        lhs = lhs + forward(h[m], pa)
        rhs = rhs + forward(h, g.adjacency)[m]
    return float(np.abs((lhs - rhs) / n_trials).max())
