"""Logistic regression on polynomially expanded features."""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit

from .base import LRConfig
from .poly import poly_expand


def _design(params: dict, X: np.ndarray) -> np.ndarray:
    Z = poly_expand(X, int(params["degree"][0]))
    return (Z - params["poly_mean"]) / params["poly_std"]


def objective(w: np.ndarray, Z: np.ndarray, y: np.ndarray, l2: float) -> tuple[float, np.ndarray]:
    """Mean log loss plus ``l2/2 * ||w[1:]||^2`` and its gradient; column 0 is the intercept."""
    s = Z @ w
    # log(1 + e^s) - y*s, stable for large |s|
    loss = np.mean(np.logaddexp(0.0, s) - y * s)
    grad = Z.T @ (expit(s) - y) / len(y)
    loss += 0.5 * l2 * np.dot(w[1:], w[1:])
    grad[1:] += l2 * w[1:]
    return float(loss), grad


def _gradient_descent(fun, w0: np.ndarray, cfg: LRConfig) -> tuple[np.ndarray, int]:
    w = w0.copy()
    step = cfg.gd_learning_rate
    loss, g = fun(w)
    for it in range(1, cfg.max_iter + 1):
        if np.linalg.norm(g) < cfg.gtol:
            return w, it - 1
        w_new = w - step * g
        new_loss, new_g = fun(w_new)
        while new_loss > loss and step > 1e-12:  # backtrack
            step *= 0.5
            w_new = w - step * g
            new_loss, new_g = fun(w_new)
        w, loss, g = w_new, new_loss, new_g
    return w, cfg.max_iter


def train(X: np.ndarray, y: np.ndarray, cfg: LRConfig) -> tuple[dict, dict]:
    Z = poly_expand(X, cfg.degree)
    mean = Z.mean(axis=0)
    std = Z.std(axis=0)
    mean[0], std[0] = 0.0, 1.0
    std = np.where(std < 1e-12, 1.0, std)
    Z = (Z - mean) / std
    y = y.astype(float)
    l2 = 1.0 / (cfg.C * len(y))

    def fun(w):
        return objective(w, Z, y, l2)

    w0 = np.zeros(Z.shape[1])
    if cfg.solver == "lbfgs":
        res = minimize(
            fun, w0, jac=True, method="L-BFGS-B",
            options={"maxiter": cfg.max_iter, "gtol": cfg.gtol, "maxcor": 10},
        )
        w, iterations = res.x, int(res.nit)
    elif cfg.solver == "gd":
        w, iterations = _gradient_descent(fun, w0, cfg)
    else:
        raise ValueError(f"unknown solver {cfg.solver!r}")

    params = {
        "degree": np.array([cfg.degree]),
        "poly_mean": mean,
        "poly_std": std,
        "weights": w,
    }
    return params, {"iterations": iterations}


def decision_function(params: dict, X: np.ndarray) -> np.ndarray:
    return _design(params, X) @ params["weights"]


def predict_proba(params: dict, X: np.ndarray) -> np.ndarray:
    return expit(decision_function(params, X))
