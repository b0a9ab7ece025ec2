"""Feed-forward network trained with mini-batch Adam on binary cross-entropy.

Hidden layers use ReLU, ReLU, then LeakyReLU (further layers repeat LeakyReLU);
the single output unit is a sigmoid.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit

from ..errors import DivergenceError
from .base import ANNConfig


def init_params(sizes: list[int], rng: np.random.Generator) -> list[np.ndarray]:
    """He-initialized ``[W0, b0, W1, b1, ...]`` for layer widths ``sizes``."""
    params = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        params.append(rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_in, fan_out)))
        params.append(np.zeros(fan_out))
    return params


def _activation(layer: int, z: np.ndarray, slope: float) -> np.ndarray:
    if layer < 2:
        return np.maximum(z, 0.0)
    return np.where(z > 0, z, slope * z)


def _activation_grad(layer: int, z: np.ndarray, slope: float) -> np.ndarray:
    if layer < 2:
        return (z > 0).astype(float)
    return np.where(z > 0, 1.0, slope)


def _forward(params: list[np.ndarray], X: np.ndarray, slope: float):
    n_layers = len(params) // 2
    a = X
    cache = [(None, X)]
    for layer in range(n_layers - 1):
        z = a @ params[2 * layer] + params[2 * layer + 1]
        a = _activation(layer, z, slope)
        cache.append((z, a))
    logits = a @ params[-2] + params[-1]
    return logits[:, 0], cache


def loss_and_grad(
    params: list[np.ndarray], X: np.ndarray, y: np.ndarray, slope: float = 0.01
) -> tuple[float, list[np.ndarray]]:
    logits, cache = _forward(params, X, slope)
    n = len(y)
    loss = float(np.mean(np.logaddexp(0.0, logits) - y * logits))
    delta = ((expit(logits) - y) / n)[:, None]
    grads: list[np.ndarray] = [None] * len(params)
    n_layers = len(params) // 2
    for layer in range(n_layers - 1, -1, -1):
        a_prev = cache[layer][1]
        grads[2 * layer] = a_prev.T @ delta
        grads[2 * layer + 1] = delta.sum(axis=0)
        if layer > 0:
            z_prev = cache[layer][0]
            delta = (delta @ params[2 * layer].T) * _activation_grad(layer - 1, z_prev, slope)
    return loss, grads


def loss(params: list[np.ndarray], X: np.ndarray, y: np.ndarray, slope: float = 0.01) -> float:
    logits, _ = _forward(params, X, slope)
    return float(np.mean(np.logaddexp(0.0, logits) - y * logits))


def train(X: np.ndarray, y: np.ndarray, cfg: ANNConfig) -> tuple[dict, dict]:
    """Mini-batch Adam; stops after ``patience`` epochs without relative improvement.

    The monitored loss is computed on a held-out slice of the training rows
    (``validation_fraction``), and the best parameters seen are returned.
    """
    rng = np.random.default_rng(cfg.seed)
    y = y.astype(float)
    n_val = int(round(cfg.validation_fraction * len(y))) if len(y) >= 20 else 0
    order = rng.permutation(len(y))
    val, fit = order[:n_val], order[n_val:]
    X_fit, y_fit = X[fit], y[fit]
    X_mon, y_mon = (X[val], y[val]) if n_val else (X_fit, y_fit)

    sizes = [X.shape[1], *cfg.hidden, 1]
    params = init_params(sizes, rng)
    m = [np.zeros_like(p) for p in params]
    v = [np.zeros_like(p) for p in params]
    step = 0
    n = len(y_fit)
    best = np.inf
    best_params = [p.copy() for p in params]
    stale = 0
    epoch = 0
    for epoch in range(1, cfg.epochs + 1):
        batches = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            idx = batches[start:start + cfg.batch_size]
            _, grads = loss_and_grad(params, X_fit[idx], y_fit[idx], cfg.leaky_slope)
            step += 1
            c1 = 1.0 - cfg.beta1**step
            c2 = 1.0 - cfg.beta2**step
            for k, g in enumerate(grads):
                m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g
                v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g * g
                params[k] = params[k] - cfg.learning_rate * (m[k] / c1) / (np.sqrt(v[k] / c2) + cfg.adam_eps)
        epoch_loss = loss(params, X_mon, y_mon, cfg.leaky_slope)
        if not np.isfinite(epoch_loss):
            raise DivergenceError(epoch, epoch_loss)
        if epoch_loss < best * (1.0 - cfg.min_rel_improvement):
            best = epoch_loss
            best_params = [p.copy() for p in params]
            stale = 0
        else:
            stale += 1
            if stale >= cfg.patience:
                break
    out = {f"p{k:02d}": p for k, p in enumerate(best_params)}
    out["leaky_slope"] = np.array([cfg.leaky_slope])
    return out, {"epochs": epoch, "monitor_loss": float(best)}


def unpack(params: dict) -> list[np.ndarray]:
    keys = sorted(k for k in params if k.startswith("p"))
    return [params[k] for k in keys]


def predict_proba(params: dict, X: np.ndarray) -> np.ndarray:
    logits, _ = _forward(unpack(params), X, float(params["leaky_slope"][0]))
    return expit(logits)
