"""Soft-margin kernel SVM trained by SMO with second-order working-set selection.

The dual is solved in the form ``min 1/2 a'Qa - e'a`` subject to ``0 <= a <= C``
and ``y'a = 0`` with ``Q_ij = y_i y_j K(x_i, x_j)`` and labels in {-1, +1}.
Decision values are mapped to probabilities by a logistic link fitted on
out-of-fold decision values.
"""

from __future__ import annotations

import logging

import numpy as np

from .base import SVMConfig
from .calibration import apply_link, fit_link

logger = logging.getLogger(__name__)

TAU = 1e-12


def rbf_kernel(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    A = np.atleast_2d(A)
    B = np.atleast_2d(B)
    sq = (A * A).sum(axis=1)[:, None] + (B * B).sum(axis=1)[None, :] - 2.0 * A @ B.T
    return np.exp(-gamma * np.maximum(sq, 0.0))


def poly_kernel(A: np.ndarray, B: np.ndarray, gamma: float, degree: int) -> np.ndarray:
    return (gamma * np.atleast_2d(A) @ np.atleast_2d(B).T + 1.0) ** degree


def kernel_matrix(A, B, kernel: str, gamma: float, degree: int) -> np.ndarray:
    if kernel == "rbf":
        return rbf_kernel(A, B, gamma)
    if kernel == "poly":
        return poly_kernel(A, B, gamma, degree)
    raise ValueError(f"unknown kernel {kernel!r}")


def smo(K: np.ndarray, y: np.ndarray, C: float, tol: float, max_iter: int) -> tuple[np.ndarray, float, int]:
    """Solve the dual for a precomputed kernel matrix.

    Returns ``(alpha, rho, iterations)``; the decision function is
    ``sum_i alpha_i y_i K(x_i, x) - rho``.
    """
    n = len(y)
    y = y.astype(float)
    alpha = np.zeros(n)
    G = -np.ones(n)
    QD = np.diag(K).copy()
    pos = y > 0

    it = 0
    while it < max_iter:
        minus_yG = -y * G
        up = np.where(pos, alpha < C, alpha > 0)
        low = np.where(pos, alpha > 0, alpha < C)
        if not up.any() or not low.any():
            break
        cand_up = np.where(up, minus_yG, -np.inf)
        i = int(np.argmax(cand_up))
        g_max = cand_up[i]
        g_min = np.min(np.where(low, minus_yG, np.inf))
        if g_max - g_min < tol:
            break

        Ki = K[i]
        b = g_max - minus_yG
        a = QD[i] + QD - 2.0 * Ki
        a = np.where(a > 0, a, TAU)
        valid = low & (minus_yG < g_max)
        score = np.where(valid, -(b * b) / a, np.inf)
        j = int(np.argmin(score))
        Kj = K[j]

        old_i, old_j = alpha[i], alpha[j]
        Qij = y[i] * y[j] * Ki[j]
        if y[i] != y[j]:
            quad = QD[i] + QD[j] + 2.0 * Qij
            quad = quad if quad > 0 else TAU
            delta = (-G[i] - G[j]) / quad
            diff = alpha[i] - alpha[j]
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = diff
            elif alpha[i] < 0:
                alpha[i] = 0.0
                alpha[j] = -diff
            if diff > 0:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = C - diff
            elif alpha[j] > C:
                alpha[j] = C
                alpha[i] = C + diff
        else:
            quad = QD[i] + QD[j] - 2.0 * Qij
            quad = quad if quad > 0 else TAU
            delta = (G[i] - G[j]) / quad
            total = alpha[i] + alpha[j]
            alpha[i] -= delta
            alpha[j] += delta
            if total > C:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = total - C
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = total - C
            else:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = total
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = total

        d_i = alpha[i] - old_i
        d_j = alpha[j] - old_j
        G += y * (y[i] * d_i * Ki + y[j] * d_j * Kj)
        it += 1
    else:
        logger.warning("SMO stopped at max_iter=%d before reaching tol", max_iter)

    return alpha, _rho(alpha, G, y, C), it


def _rho(alpha: np.ndarray, G: np.ndarray, y: np.ndarray, C: float) -> float:
    yG = y * G
    free = (alpha > 0) & (alpha < C)
    if free.any():
        return float(np.mean(yG[free]))
    at_upper = alpha >= C
    at_lower = alpha <= 0
    pos = y > 0
    # bounds on rho from the KKT conditions of bounded variables
    lb_mask = (pos & at_upper) | (~pos & at_lower)
    ub_mask = (pos & at_lower) | (~pos & at_upper)
    lb = yG[lb_mask].max() if lb_mask.any() else -np.inf
    ub = yG[ub_mask].min() if ub_mask.any() else np.inf
    if not np.isfinite(lb):
        return float(ub)
    if not np.isfinite(ub):
        return float(lb)
    return float((lb + ub) / 2)


def _fit_dual(X: np.ndarray, y01: np.ndarray, cfg: SVMConfig) -> dict:
    y = np.where(y01 == 1, 1.0, -1.0)
    K = kernel_matrix(X, X, cfg.kernel, cfg.gamma, cfg.degree)
    alpha, rho, iterations = smo(K, y, cfg.C, cfg.tol, cfg.max_iter)
    sv = alpha > 0
    return {
        "support_vectors": X[sv],
        "dual_coef": alpha[sv] * y[sv],
        "rho": np.array([rho]),
        "C": np.array([cfg.C]),
        "kernel_spec": np.array([cfg.gamma, float(cfg.degree), 1.0 if cfg.kernel == "poly" else 0.0]),
        "iterations": iterations,
    }


def _kernel_from_params(params: dict, A, B) -> np.ndarray:
    gamma, degree, is_poly = params["kernel_spec"]
    kernel = "poly" if is_poly else "rbf"
    return kernel_matrix(A, B, kernel, float(gamma), int(degree))


def decision_function(params: dict, X: np.ndarray) -> np.ndarray:
    K = _kernel_from_params(params, X, params["support_vectors"])
    return K @ params["dual_coef"] - params["rho"][0]


def _oof_scores(X: np.ndarray, y01: np.ndarray, cfg: SVMConfig) -> np.ndarray:
    from .training import stratified_assignments

    folds = stratified_assignments(y01, cfg.platt_folds, cfg.seed)
    scores = np.empty(len(y01))
    for f in range(cfg.platt_folds):
        test = folds == f
        train = ~test
        if len(np.unique(y01[train])) < 2:
            scores[test] = 0.0
            continue
        sub = _fit_dual(X[train], y01[train], cfg)
        scores[test] = decision_function(sub, X[test])
    return scores


def train(X: np.ndarray, y01: np.ndarray, cfg: SVMConfig) -> tuple[dict, dict]:
    fitted = _fit_dual(X, y01, cfg)
    iterations = fitted.pop("iterations")
    if cfg.platt_folds >= 2 and min(np.sum(y01 == 0), np.sum(y01 == 1)) >= cfg.platt_folds:
        scores = _oof_scores(X, y01, cfg)
    else:
        scores = decision_function(fitted, X)
    fitted["link"] = fit_link(scores, y01)
    return fitted, {"iterations": iterations, "n_support": int(len(fitted["dual_coef"]))}


def predict_proba(params: dict, X: np.ndarray) -> np.ndarray:
    return apply_link(params["link"], decision_function(params, X))


def kkt_residuals(params: dict) -> np.ndarray:
    """KKT violation of every support vector, recomputed from stored parameters.

    Free vectors (``0 < alpha < C``) must sit on the margin, ``y f(x) = 1``;
    bounded vectors (``alpha = C``) must satisfy ``y f(x) <= 1``.
    """
    coef = params["dual_coef"]
    C = float(params["C"][0])
    alpha = np.abs(coef)
    y = np.sign(coef)
    margin = y * decision_function(params, params["support_vectors"])
    at_bound = alpha >= C
    return np.where(at_bound, np.maximum(0.0, margin - 1.0), np.abs(margin - 1.0))
