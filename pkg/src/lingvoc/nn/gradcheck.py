"""Finite-difference gradient verification utilities.

A check perturbs one coordinate at a time (central differences, float64)
and compares against the hand-coded gradients. The scalar loss is a fixed
random weighting of the outputs so every output coordinate contributes.
"""

from __future__ import annotations

import numpy as np


def numeric_gradient(f, x: np.ndarray, eps: float = 1e-4) -> np.ndarray:
    """Central-difference gradient of scalar f() wrt array x, mutated in place."""
    if not 1e-6 <= eps <= 1e-2:
        raise ValueError(f"eps {eps} outside [1e-6, 1e-2]")
    grad = np.zeros_like(x)
    it = np.nditer(x, flags=["multi_index"])
    while not it.finished:
        idx = it.multi_index
        orig = x[idx]
        x[idx] = orig + eps
        fp = f()
        x[idx] = orig - eps
        fm = f()
        x[idx] = orig
        grad[idx] = (fp - fm) / (2.0 * eps)
        it.iternext()
    return grad


def max_relative_error(analytic: np.ndarray, numeric: np.ndarray,
                       floor: float = 1e-3) -> float:
    """Max over coordinates of |a - n| / max(|a|, |n|, floor)."""
    a = np.asarray(analytic, dtype=np.float64)
    n = np.asarray(numeric, dtype=np.float64)
    denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
    return float(np.max(np.abs(a - n) / denom))


def check_gradients(loss_fn, run_backward, variables, eps: float = 1e-4) -> float:
    """Compare analytic and numeric gradients for a list of arrays.

    loss_fn() recomputes the scalar loss from current variable values;
    run_backward() runs the analytic pass and returns a gradient array per
    variable, in the same order. Returns the worst relative error seen.
    """
    analytic = run_backward()
    if len(analytic) != len(variables):
        raise ValueError("one analytic gradient required per variable")
    worst = 0.0
    for var, grad in zip(variables, analytic):
        numeric = numeric_gradient(loss_fn, var, eps=eps)
        worst = max(worst, max_relative_error(grad, numeric))
    return worst
