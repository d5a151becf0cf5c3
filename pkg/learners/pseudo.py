from typing import Tuple

import numpy as np

from utils.errors import EstimatorError


def _check_propensity(pi: np.ndarray) -> np.ndarray:
    pi = np.asarray(pi, dtype=float)
    if not np.all((pi > 0) & (pi < 1)):
        raise EstimatorError("propensities must lie strictly inside (0, 1)")
    return pi


def ipw_pseudo(Y: np.ndarray, W: np.ndarray, pi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Per-row (Y_ipw_1, Y_ipw_0) = (Y W / pi, Y (1 - W) / (1 - pi)); pi is P(W = 1 | x)."""
    pi = _check_propensity(pi)
    Y = np.asarray(Y, dtype=float)
    W = np.asarray(W, dtype=float)
    return Y * W / pi, Y * (1 - W) / (1 - pi)


def dr_pseudo(Y: np.ndarray, W: np.ndarray, mu0: np.ndarray, mu1: np.ndarray,
              pi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Per-row doubly robust outcomes Y_dr_t = mu(x, t) + 1(W = t) (Y - mu(x, W)) / pi_t.

    mu0 and mu1 are the outcome model evaluated at w = 0 and w = 1.
    """
    pi = _check_propensity(pi)
    Y = np.asarray(Y, dtype=float)
    W = np.asarray(W, dtype=float)
    mu0 = np.asarray(mu0, dtype=float)
    mu1 = np.asarray(mu1, dtype=float)
    residual = Y - np.where(W == 1, mu1, mu0)
    y1 = mu1 + W * residual / pi
    y0 = mu0 + (1 - W) * residual / (1 - pi)
    return y1, y0
