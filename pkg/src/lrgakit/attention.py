"""Low-rank global attention.

``LRGA(X) = [m1(X) (m2(X)^T m3(X)) / eta(X), m4(X)]`` with the scalar
normalisation ``eta(X) = (1/n) <1^T m1(X), 1^T m2(X)>``.  The ``kappa x kappa``
product is formed first, so memory stays O(n kappa) and work O(n kappa^2).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

ACTIVATIONS = ("relu", "identity")


class DegenerateNormalization(ArithmeticError):
    """``|eta(X)|`` fell at or below the guard."""


@dataclass(frozen=True, eq=False)
class RowMap:
    """Single-layer MLP applied to each row: ``act(x W + b)``."""

    weight: np.ndarray
    bias: np.ndarray
    activation: str = "relu"

    def __post_init__(self):
        w = np.asarray(self.weight, dtype=float)
        b = np.asarray(self.bias, dtype=float)
        if w.ndim != 2 or b.shape != (w.shape[1],):
            raise ValueError(f"weight {w.shape} and bias {b.shape} disagree")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"activation must be one of {ACTIVATIONS}")
        object.__setattr__(self, "weight", w)
        object.__setattr__(self, "bias", b)

    @property
    def d_in(self) -> int:
        return self.weight.shape[0]

    @property
    def d_out(self) -> int:
        return self.weight.shape[1]

    def __call__(self, x: np.ndarray) -> np.ndarray:
        h = x @ self.weight
        h += self.bias
        if self.activation == "relu":
            np.maximum(h, 0.0, out=h)
        return h

    @classmethod
    def random(cls, d_in: int, d_out: int, rng: np.random.Generator, activation: str = "relu", bias_scale: float = 0.1):
        w = rng.normal(scale=1 / np.sqrt(d_in), size=(d_in, d_out))
        b = rng.normal(scale=bias_scale, size=d_out)
        return cls(w, b, activation)

    def to_dict(self) -> dict:
        return {
            "d_in": self.d_in,
            "d_out": self.d_out,
            "activation": self.activation,
            "weight": self.weight.ravel().tolist(),
            "bias": self.bias.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "RowMap":
        w = np.asarray(doc["weight"], dtype=float).reshape(doc["d_in"], doc["d_out"])
        return cls(w, np.asarray(doc["bias"], dtype=float), doc.get("activation", "relu"))


@dataclass(frozen=True, eq=False)
class LrgaParams:
    m1: RowMap
    m2: RowMap
    m3: RowMap
    m4: RowMap
    m5: Optional[RowMap] = None
    eta_epsilon: float = 1e-12

    def __post_init__(self):
        widths = {m.d_out for m in (self.m1, self.m2, self.m3, self.m4)}
        if len(widths) != 1:
            raise ValueError(f"m1..m4 must share an output width, got {sorted(widths)}")
        ins = {m.d_in for m in (self.m1, self.m2, self.m3, self.m4)}
        if len(ins) != 1:
            raise ValueError(f"m1..m4 must share an input width, got {sorted(ins)}")

    @property
    def kappa(self) -> int:
        return self.m1.d_out

    @property
    def d_in(self) -> int:
        return self.m1.d_in

    @classmethod
    def random(
        cls,
        d_in: int,
        kappa: int,
        rng: np.random.Generator,
        activation: str = "relu",
        reduce_from: Optional[int] = None,
    ) -> "LrgaParams":
        maps = [RowMap.random(d_in, kappa, rng, activation) for _ in range(4)]
        m5 = RowMap.random(reduce_from, d_in, rng, activation) if reduce_from else None
        return cls(*maps, m5=m5)

    def to_json(self) -> str:
        doc = {f"m{k}": getattr(self, f"m{k}").to_dict() for k in range(1, 5)}
        if self.m5 is not None:
            doc["m5"] = self.m5.to_dict()
        doc["kappa"] = self.kappa
        doc["eta_epsilon"] = self.eta_epsilon
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "LrgaParams":
        doc = json.loads(text)
        maps = [RowMap.from_dict(doc[f"m{k}"]) for k in range(1, 5)]
        m5 = RowMap.from_dict(doc["m5"]) if "m5" in doc else None
        params = cls(*maps, m5=m5, eta_epsilon=doc.get("eta_epsilon", 1e-12))
        if "kappa" in doc and doc["kappa"] != params.kappa:
            raise ValueError(f"declared kappa {doc['kappa']} does not match weights ({params.kappa})")
        return params


def eta(x: np.ndarray, params: LrgaParams) -> float:
    n = x.shape[0]
    return float(params.m1(x).sum(axis=0) @ params.m2(x).sum(axis=0)) / n


def lrga_forward(x: np.ndarray, params: LrgaParams) -> np.ndarray:
    """``n x 2 kappa`` output; no ``n x n`` array is ever allocated."""
    x = np.asarray(x, dtype=float)
    n, k = x.shape[0], params.kappa
    m2 = params.m2(x)
    gram = m2.T @ params.m3(x)
    s2 = m2.sum(axis=0)
    del m2
    m1 = params.m1(x)
    norm = float(m1.sum(axis=0) @ s2) / n
    if abs(norm) <= params.eta_epsilon:
        raise DegenerateNormalization(f"|eta| = {abs(norm):.3e} <= {params.eta_epsilon:g}")
    out = np.empty((n, 2 * k))
    np.matmul(m1, gram / norm, out=out[:, :k])
    del m1
    out[:, k:] = params.m4(x)
    return out


def dense_attention_oracle(x: np.ndarray, params: LrgaParams, max_n: int = 256) -> np.ndarray:
    """Same value as :func:`lrga_forward` through the explicit ``n x n`` attention matrix.

    The normaliser is taken as the total mass of ``m1 m2^T`` over ``n``, an
    independent route to the same scalar.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if n > max_n:
        raise ValueError(f"dense oracle limited to n <= {max_n}, got {n}")
    scores = params.m1(x) @ params.m2(x).T
    norm = scores.sum() / n
    if abs(norm) <= params.eta_epsilon:
        raise DegenerateNormalization(f"|eta| = {abs(norm):.3e} <= {params.eta_epsilon:g}")
    attention = scores / norm
    return np.concatenate([attention @ params.m3(x), params.m4(x)], axis=1)


def augment_layer(x: np.ndarray, gnn_out: np.ndarray, params: LrgaParams) -> np.ndarray:
    """``[X, LRGA(X), GNN(X)]``, reduced by ``m5`` when present."""
    x = np.asarray(x, dtype=float)
    gnn_out = np.asarray(gnn_out, dtype=float).reshape(x.shape[0], -1)
    out = np.concatenate([x, lrga_forward(x, params), gnn_out], axis=1)
    if params.m5 is not None:
        if params.m5.d_in != out.shape[1]:
            raise ValueError(f"m5 expects width {params.m5.d_in}, concatenation has {out.shape[1]}")
        out = params.m5(out)
    return out


def multi_head_forward(x: np.ndarray, heads: Sequence[LrgaParams], gnn_out: np.ndarray) -> np.ndarray:
    """``[X, LRGA_1(X), ..., LRGA_k(X), GNN(X)]``."""
    if not heads:
        raise ValueError("at least one head is required")
    x = np.asarray(x, dtype=float)
    blocks = [x]
    for idx, params in enumerate(heads):
        try:
            blocks.append(lrga_forward(x, params))
        except DegenerateNormalization as exc:
            raise DegenerateNormalization(f"head {idx}: {exc}") from exc
    blocks.append(np.asarray(gnn_out, dtype=float).reshape(x.shape[0], -1))
    return np.concatenate(blocks, axis=1)
