"""Logistic link mapping raw classifier scores to probabilities (Platt scaling)."""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit


def fit_link(scores: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Fit ``p = sigmoid(a * score + b)`` with Platt's smoothed targets.

    Returns ``[a, b]``.
    """
    scores = np.asarray(scores, dtype=float)
    y = np.asarray(y)
    n_pos = int(np.sum(y == 1))
    n_neg = len(y) - n_pos
    t = np.where(y == 1, (n_pos + 1.0) / (n_pos + 2.0), 1.0 / (n_neg + 2.0))

    def fun(ab):
        z = ab[0] * scores + ab[1]
        loss = np.sum(np.logaddexp(0.0, z) - t * z)
        r = expit(z) - t
        return loss, np.array([np.dot(r, scores), np.sum(r)])

    prior = np.log((n_pos + 1.0) / (n_neg + 1.0))
    res = minimize(fun, np.array([1.0, prior]), jac=True, method="L-BFGS-B",
                   options={"maxiter": 200, "gtol": 1e-10})
    return res.x


def apply_link(link: np.ndarray, scores: np.ndarray) -> np.ndarray:
    return expit(link[0] * np.asarray(scores, dtype=float) + link[1])
