"""Extreme learning machine: random hidden layer, ridge-solved output weights."""

from __future__ import annotations

import numpy as np
import scipy.linalg
from scipy.special import expit

from .base import ELMConfig
from .calibration import apply_link, fit_link

_ACTIVATIONS = {
    "sigmoid": expit,
    "relu": lambda z: np.maximum(z, 0.0),
}


def hidden_layer(params: dict, X: np.ndarray) -> np.ndarray:
    """Hidden activations with a trailing constant column for the output bias."""
    act = _ACTIVATIONS["relu" if params["activation"][0] == 1 else "sigmoid"]
    H = act(X @ params["input_weights"] + params["input_bias"])
    return np.hstack([H, np.ones((H.shape[0], 1))])


def solve_ridge(H: np.ndarray, y: np.ndarray, ridge: float) -> np.ndarray:
    """Solve ``(H'H + ridge*I) beta = H'y`` by Cholesky plus one refinement step."""
    A = H.T @ H + ridge * np.eye(H.shape[1])
    rhs = H.T @ y
    factor = scipy.linalg.cho_factor(A)
    beta = scipy.linalg.cho_solve(factor, rhs)
    beta += scipy.linalg.cho_solve(factor, rhs - A @ beta)
    return beta


def ridge_residual(H: np.ndarray, y: np.ndarray, ridge: float, beta: np.ndarray) -> float:
    A = H.T @ H + ridge * np.eye(H.shape[1])
    return float(np.linalg.norm(A @ beta - H.T @ y))


def train(X: np.ndarray, y: np.ndarray, cfg: ELMConfig) -> tuple[dict, dict]:
    if cfg.activation not in _ACTIVATIONS:
        raise ValueError(f"unknown activation {cfg.activation!r}")
    rng = np.random.default_rng(cfg.seed)
    d = X.shape[1]
    params = {
        "input_weights": rng.uniform(-1.0, 1.0, size=(d, cfg.hidden)),
        "input_bias": rng.uniform(-1.0, 1.0, size=cfg.hidden),
        "activation": np.array([1 if cfg.activation == "relu" else 0]),
    }
    H = hidden_layer(params, X)
    params["output_weights"] = solve_ridge(H, y.astype(float), cfg.ridge)
    params["link"] = fit_link(H @ params["output_weights"], y)
    return params, {"hidden": cfg.hidden}


def raw_output(params: dict, X: np.ndarray) -> np.ndarray:
    return hidden_layer(params, X) @ params["output_weights"]


def predict_proba(params: dict, X: np.ndarray) -> np.ndarray:
    return apply_link(params["link"], raw_output(params, X))
