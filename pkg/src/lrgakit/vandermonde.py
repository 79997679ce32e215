"""Multivariate Vandermonde system, monomial decomposition and the sample-complexity bound.

The node set is ``B = {beta in N_0^D : |beta| <= n}`` in graded lexicographic
order and ``V[alpha, beta] = beta**alpha`` (0**0 = 1).  Any monomial of degree
at most ``n`` is a combination of ridge powers::

    x**delta = sum_{beta in B} a_beta * (<beta, x> + 1)**n

where ``a`` solves ``diag(d) V a = e_delta`` with ``d_alpha`` the multinomial
coefficients of ``(<beta, x> + 1)**n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .multiindex import MultiIndex, count_multi_indices, enumerate_multi_indices, monomials, multinomial

DEFAULT_SIZE_CAP = 2_000
RESIDUAL_TOL = 1e-6


class IllConditionedSystem(ArithmeticError):
    """The double-precision solve failed its residual check."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message}: residual {residual:.3e} > {RESIDUAL_TOL:g}")
        self.residual = residual


@dataclass(frozen=True, eq=False)
class VandermondeSystem:
    n: int
    D: int
    nodes: list[MultiIndex] = field(repr=False)
    matrix: np.ndarray = field(repr=False)
    inverse: np.ndarray = field(repr=False)

    @property
    def N(self) -> int:
        return len(self.nodes)

    @property
    def c(self) -> float:
        """Induced infinity norm of the inverse (max absolute row sum)."""
        return float(np.abs(self.inverse).sum(axis=1).max())


def vandermonde_matrix(n: int, D: int) -> tuple[list[MultiIndex], np.ndarray]:
    nodes = enumerate_multi_indices(D, n)
    pts = np.array(nodes, dtype=float).reshape(len(nodes), D)
    # monomials(pts, nodes)[beta, alpha] = beta**alpha
    return nodes, monomials(pts, nodes).T


def build_vandermonde(n: int, D: int, size_cap: int = DEFAULT_SIZE_CAP) -> VandermondeSystem:
    if n < 0 or D < 1:
        raise ValueError(f"need n >= 0 and D >= 1, got n={n}, D={D}")
    N = count_multi_indices(D, n)
    if N > size_cap:
        raise ValueError(f"system size N={N} exceeds cap {size_cap}")
    nodes, v = vandermonde_matrix(n, D)
    inv = np.linalg.inv(v)
    residual = float(np.abs(v @ inv - np.eye(N)).sum(axis=1).max())
    if residual > RESIDUAL_TOL:
        raise IllConditionedSystem(f"Vandermonde inverse for n={n}, D={D}", residual)
    return VandermondeSystem(n, D, nodes, v, inv)


def ridge_coefficients(n: int, alphas: Sequence[MultiIndex]) -> np.ndarray:
    """``d_alpha = n! / (alpha! (n - |alpha|)!)``, the coefficients of ``(<beta, x> + 1)**n``."""
    return np.array([float(multinomial(tuple(a) + (n - sum(a),))) for a in alphas])


def solve_monomial_coeffs(delta: Sequence[int], n: int, D: int) -> np.ndarray:
    """Coefficients ``a`` over ``B`` with ``x**delta = sum_beta a_beta (<beta, x> + 1)**n``."""
    delta = tuple(int(v) for v in delta)
    if len(delta) != D:
        raise ValueError(f"delta has length {len(delta)}, expected {D}")
    if sum(delta) > n:
        raise ValueError(f"|delta| = {sum(delta)} exceeds degree {n}")
    nodes, v = vandermonde_matrix(n, D)
    system = ridge_coefficients(n, nodes)[:, None] * v
    rhs = np.zeros(len(nodes))
    rhs[nodes.index(delta)] = 1.0
    a = np.linalg.solve(system, rhs)
    residual = float(np.abs(system @ a - rhs).max())
    if residual > RESIDUAL_TOL:
        raise IllConditionedSystem(f"monomial system for delta={delta}, n={n}", residual)
    return a


def ridge_expansion(a: np.ndarray, n: int, D: int, x: np.ndarray) -> np.ndarray:
    """Evaluate ``sum_beta a_beta (<beta, x> + 1)**n`` at the rows of ``x``."""
    nodes = np.array(enumerate_multi_indices(D, n), dtype=float).reshape(-1, D)
    return ((np.atleast_2d(x) @ nodes.T + 1.0) ** n) @ a


def even_degree(n: int) -> int:
    return 2 * math.ceil(n / 2)


def sample_complexity_bound(n: int, D: int, epsilon: float, delta_fail: float) -> float:
    """``((n^2 + 1)^((n + 1)/2) c_{n,D} + ln(1/delta)) / epsilon^2`` with ``n`` made even.

    This is the bracketed quantity of an O(.) bound whose constant is not
    stated; it is a reported value, not a guarantee.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if not 0 < delta_fail < 1:
        raise ValueError("delta_fail must lie in (0, 1)")
    n = even_degree(n)
    c = build_vandermonde(n, D).c
    return ((n * n + 1) ** ((n + 1) / 2) * c + math.log(1 / delta_fail)) / epsilon**2
