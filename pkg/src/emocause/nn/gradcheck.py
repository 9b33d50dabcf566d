"""Central finite-difference verification of analytic gradients."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

DEFAULT_EPS = 1e-4
REL_FLOOR = 1e-8


def numerical_gradient(loss_fn: Callable[[], float], param: np.ndarray,
                       eps: float = DEFAULT_EPS) -> np.ndarray:
    """Central differences of loss_fn w.r.t. every element of param,
    perturbing param in place."""
    grad = np.empty_like(param)
    flat = param.ravel()
    gflat = grad.ravel()
    for k in range(flat.size):
        saved = flat[k]
        flat[k] = saved + eps
        plus = loss_fn()
        flat[k] = saved - eps
        minus = loss_fn()
        flat[k] = saved
        gflat[k] = (plus - minus) / (2.0 * eps)
    return grad


def max_relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    denom = np.maximum(np.abs(analytic) + np.abs(numeric), REL_FLOOR)
    return float(np.max(np.abs(analytic - numeric) / denom))


def gradient_check(loss_fn: Callable[[], float], params: Sequence[np.ndarray],
                   analytic_grads: Sequence[np.ndarray],
                   eps: float = DEFAULT_EPS) -> float:
    """Max over all parameters of the elementwise relative error between the
    supplied analytic gradients and central finite differences.

    loss_fn must recompute the loss from the current (mutated) values of
    params, with any internal randomness fixed.
    """
    if len(params) != len(analytic_grads):
        raise ValueError("params and analytic_grads differ in length")
    worst = 0.0
    for param, analytic in zip(params, analytic_grads):
        numeric = numerical_gradient(loss_fn, param, eps=eps)
        worst = max(worst, max_relative_error(analytic, numeric))
    return worst
