"""Randomised identity suites shared by the CLI and the test-suite."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .kernels import phi_product
from .multiindex import enumerate_multi_indices
from .vandermonde import build_vandermonde, ridge_expansion, solve_monomial_coeffs

KERNEL_TOL = 1e-9
RIDGE_TOL = 1e-6
RIDGE_CASES = ((2, 1), (3, 1), (4, 1), (2, 2), (3, 2))


def random_beta(rng: np.random.Generator, blocks: int, max_degree: int) -> tuple[int, ...]:
    total = int(rng.integers(0, max_degree + 1))
    cuts = np.sort(rng.integers(0, total + 1, size=blocks - 1))
    return tuple(np.diff(np.concatenate([[0], cuts, [total]])).tolist())


def kernel_identity_suite(
    cases: int = 1000,
    seed: int = 0,
    max_degree: int = 4,
    max_block_dim: int = 4,
    max_blocks: int = 4,
    perturb: float = 0.0,
) -> dict:
    """``<phi_b(x), phi_b(y)>`` against ``prod_l <x_l, y_l>**b_l`` on random blocks."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(cases):
        k = int(rng.integers(1, max_blocks + 1))
        dims = rng.integers(1, max_block_dim + 1, size=k)
        beta = random_beta(rng, k, max_degree)
        xs = [rng.uniform(-1.5, 1.5, size=d) for d in dims]
        ys = [rng.uniform(-1.5, 1.5, size=d) for d in dims]
        lhs = float(phi_product(xs, beta) @ phi_product(ys, beta)) * (1 + perturb)
        rhs = float(np.prod([np.dot(x, y) ** b for x, y, b in zip(xs, ys, beta)]))
        worst = max(worst, abs(lhs - rhs) / (1 + abs(rhs)))
    return {"cases": cases, "max_rel_error": worst, "tolerance": KERNEL_TOL, "pass": worst <= KERNEL_TOL}


def ridge_identity_suite(
    cases: Sequence[tuple[int, int]] = RIDGE_CASES,
    points: int = 100,
    seed: int = 0,
    perturb: float = 0.0,
) -> dict:
    """Ridge-power decomposition of every monomial ``|delta| <= n`` and the ``||a||_1`` bound."""
    rng = np.random.default_rng(seed)
    worst_resid, worst_excess, per_case = 0.0, -np.inf, []
    for n, D in cases:
        c = build_vandermonde(n, D).c
        x = rng.uniform(-1.0, 1.0, size=(points, D))
        case_resid, case_norm = 0.0, 0.0
        for delta in enumerate_multi_indices(D, n):
            a = solve_monomial_coeffs(delta, n, D) + perturb
            target = np.prod(x ** np.array(delta), axis=1)
            resid = np.abs(target - ridge_expansion(a, n, D, x)) / (1 + np.abs(target))
            case_resid = max(case_resid, float(resid.max()))
            case_norm = max(case_norm, float(np.abs(a).sum()))
        worst_resid = max(worst_resid, case_resid)
        worst_excess = max(worst_excess, case_norm - c)
        per_case.append({"n": n, "D": D, "c": c, "max_l1": case_norm, "max_rel_residual": case_resid})
    ok = worst_resid <= RIDGE_TOL and worst_excess <= RIDGE_TOL
    return {
        "cases": per_case,
        "max_rel_error": worst_resid,
        "max_norm_excess": worst_excess,
        "tolerance": RIDGE_TOL,
        "pass": bool(ok),
    }
