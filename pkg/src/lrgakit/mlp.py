"""Two-layer ReLU network trained by gradient descent on monomial targets.

The network is ``f(x) = a2 . relu(x W1 + b1)``.  Monomial tasks draw
``x ~ U[-1, 1]^D`` and (by default) append the constant coordinate 1, so the
net is trained on the hyperplane ``x_{D+1} = 1``.

Initialisation: ``W1 ~ N(0, init_scale^2 / d_in)``, ``a2 ~ N(0, 1 / h)``,
``b1 = 0``.  All parameters are trained; the over-parameterised (NTK)
analysis behind the learnability claim only needs the output layer, so
results at desk widths are qualitative.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from statistics import median
from typing import Optional, Sequence

import numpy as np

INIT_SCHEME = "W1~N(0,init_scale^2/d_in), b1=0, a2~N(0,1/h)"


@dataclass
class TwoLayerMlp:
    w1: np.ndarray
    b1: np.ndarray
    a2: np.ndarray

    @property
    def width(self) -> int:
        return self.a2.shape[0]

    @classmethod
    def init(cls, d_in: int, width: int, seed: int, init_scale: float = 1.0) -> "TwoLayerMlp":
        if width < 1:
            raise ValueError("width must be positive")
        rng = np.random.default_rng(seed)
        w1 = rng.normal(scale=init_scale / math.sqrt(d_in), size=(d_in, width))
        a2 = rng.normal(scale=1 / math.sqrt(width), size=width)
        return cls(w1, np.zeros(width), a2)

    def copy(self) -> "TwoLayerMlp":
        return TwoLayerMlp(self.w1.copy(), self.b1.copy(), self.a2.copy())


@dataclass
class Gradients:
    w1: np.ndarray
    b1: np.ndarray
    a2: np.ndarray


def forward(mlp: TwoLayerMlp, x: np.ndarray) -> np.ndarray:
    return np.maximum(x @ mlp.w1 + mlp.b1, 0.0) @ mlp.a2


def mse(mlp: TwoLayerMlp, x: np.ndarray, y: np.ndarray) -> float:
    return float(np.mean((forward(mlp, x) - y) ** 2))


def gradients(mlp: TwoLayerMlp, x: np.ndarray, y: np.ndarray) -> Gradients:
    """Exact gradients of ``mean((f(x) - y)^2)``; relu'(0) is taken as 0."""
    # bias folded in as an extra input row: one matmul each way
    xa = np.concatenate([x, np.ones((x.shape[0], 1))], axis=1)
    pre = xa @ np.vstack([mlp.w1, mlp.b1])
    mask = pre > 0
    hidden = np.multiply(pre, mask, out=pre)
    resid = (hidden @ mlp.a2 - y) * (2.0 / x.shape[0])
    g_a2 = hidden.T @ resid
    g_pre = np.outer(resid, mlp.a2)
    g_pre *= mask
    g = xa.T @ g_pre
    return Gradients(g[:-1], g[-1], g_a2)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.05
    steps: int = 3000  # calibrated by scripts/pilot_learn.py
    batch_size: Optional[int] = None
    seed: int = 0
    init_scale: float = 1.0
    curve_points: int = 100

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")
        if self.steps < 0:
            raise ValueError("steps must be non-negative")


@dataclass(frozen=True)
class MonomialTask:
    delta: tuple[int, ...]
    append_one: bool = True

    def __post_init__(self):
        if not self.delta or any(v < 0 for v in self.delta):
            raise ValueError("delta must be a non-empty vector of non-negative exponents")
        object.__setattr__(self, "delta", tuple(int(v) for v in self.delta))

    @property
    def input_dim(self) -> int:
        return len(self.delta)

    @property
    def net_input_dim(self) -> int:
        return self.input_dim + int(self.append_one)

    def sample(self, m: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        x = rng.uniform(-1.0, 1.0, size=(m, self.input_dim))
        y = np.prod(x ** np.array(self.delta), axis=1)
        if self.append_one:
            x = np.concatenate([x, np.ones((m, 1))], axis=1)
        return x, y


@dataclass
class TrainResult:
    train_mse: float
    test_mse: float
    initial_mse: float
    curve: list[tuple[int, float]]
    diverged: bool
    mlp: TwoLayerMlp = field(repr=False)
    metadata: dict = field(default_factory=dict)


def train_monomial(task: MonomialTask, m_samples: int, mlp_width: int, cfg: TrainConfig) -> TrainResult:
    """Fit ``x**delta`` from ``m`` samples, evaluate on ``10 m`` fresh ones."""
    if m_samples < 10:
        raise ValueError("need at least 10 training samples")
    data_ss, test_ss, init_ss, batch_ss = np.random.SeedSequence([cfg.seed, m_samples]).spawn(4)
    x, y = task.sample(m_samples, np.random.default_rng(data_ss))
    x_test, y_test = task.sample(10 * m_samples, np.random.default_rng(test_ss))
    init_seed = int(init_ss.generate_state(1)[0])
    mlp = TwoLayerMlp.init(task.net_input_dim, mlp_width, init_seed, cfg.init_scale)
    batch_rng = np.random.default_rng(batch_ss)

    initial = mse(mlp, x, y)
    every = max(1, cfg.steps // cfg.curve_points)
    curve = [(0, initial)]
    diverged = False
    for step in range(1, cfg.steps + 1):
        if cfg.batch_size is None or cfg.batch_size >= m_samples:
            xb, yb = x, y
        else:
            idx = batch_rng.choice(m_samples, size=cfg.batch_size, replace=False)
            xb, yb = x[idx], y[idx]
        g = gradients(mlp, xb, yb)
        mlp.w1 -= cfg.learning_rate * g.w1
        mlp.b1 -= cfg.learning_rate * g.b1
        mlp.a2 -= cfg.learning_rate * g.a2
        if step % every == 0 or step == cfg.steps:
            loss = mse(mlp, x, y)
            curve.append((step, loss))
            if not np.isfinite(loss) or loss > 1e3 * max(initial, 1e-12):
                diverged = True
                break

    meta = {
        "init_scheme": INIT_SCHEME,
        "task": {"delta": list(task.delta), "append_one": task.append_one},
        "m_samples": m_samples,
        "width": mlp_width,
        "config": asdict(cfg),
        "schedule": "constant learning rate, full-batch" if cfg.batch_size is None else "constant learning rate, minibatch",
    }
    return TrainResult(
        train_mse=mse(mlp, x, y),
        test_mse=mse(mlp, x_test, y_test),
        initial_mse=initial,
        curve=curve,
        diverged=diverged,
        mlp=mlp,
        metadata=meta,
    )


@dataclass(frozen=True)
class ExperimentRow:
    m: int
    median_test_mse: float
    test_mses: tuple[float, ...]
    bound: float


@dataclass(frozen=True)
class ExperimentTable:
    rows: list[ExperimentRow]
    monotone: bool
    inversions: int


def count_inversions(values: Sequence[float]) -> int:
    return sum(1 for a, b in zip(values, values[1:]) if b > a)


def sample_complexity_experiment(
    task: MonomialTask,
    m_grid: Sequence[int],
    seeds: Sequence[int],
    mlp_width: int,
    cfg: TrainConfig,
    bound_delta: float = 0.1,
) -> ExperimentTable:
    """Median test MSE per sample size, plus the informational bound column.

    The grid is weakly monotone when medians increase at most once along it.
    """
    from .vandermonde import sample_complexity_bound

    if list(m_grid) != sorted(m_grid):
        raise ValueError("m_grid must be ascending")
    rows = []
    for m in m_grid:
        mses = tuple(
            train_monomial(task, m, mlp_width, TrainConfig(**{**asdict(cfg), "seed": s})).test_mse for s in seeds
        )
        med = float(median(mses))
        eps = math.sqrt(med) if med > 0 else float("nan")
        bound = sample_complexity_bound(sum(task.delta), task.input_dim, eps, bound_delta) if med > 0 else float("inf")
        rows.append(ExperimentRow(m, med, mses, bound))
    inv = count_inversions([r.median_test_mse for r in rows])
    return ExperimentTable(rows, inv <= 1, inv)
