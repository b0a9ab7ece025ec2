"""Fitting entry points and stratified k-fold cross-validation."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..assembly import FeatureMatrix, apply_scaler, fit_scaling
from ..errors import DegenerateTrainingError, InvalidInputError
from ..metrics import EvaluationReport, evaluate
from ..ratio_tables import TablePair
from . import ann, elm, logistic, svm
from .base import ModelKind, TrainedModel, default_config

_TRAINERS = {
    ModelKind.LR: logistic.train,
    ModelKind.SVM: svm.train,
    ModelKind.ELM: elm.train,
    ModelKind.ANN: ann.train,
}


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignments: np.ndarray

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments != fold)


def stratified_assignments(labels: np.ndarray, k: int, seed: int) -> np.ndarray:
    """Fold index per row: shuffle each class, then deal rows round-robin.

    Dealing continues across classes, so fold sizes differ by at most one and
    each class is spread as evenly as possible.
    """
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    order = np.concatenate([rng.permutation(np.flatnonzero(labels == c)) for c in np.unique(labels)])
    out = np.empty(len(labels), dtype=np.int64)
    out[order] = np.arange(len(order)) % k
    return out


def kfold(m: FeatureMatrix, k: int = 10, seed: int = 0) -> FoldPlan:
    if k < 2:
        raise InvalidInputError("k must be >= 2")
    if k > len(m):
        raise InvalidInputError(f"k={k} exceeds the {len(m)} available rows")
    return FoldPlan(k, stratified_assignments(m.labels, k, seed))


def fit_model(
    m: FeatureMatrix,
    kind: ModelKind | str,
    cfg=None,
    fold_id: int = -1,
    tables: Optional[TablePair] = None,
) -> TrainedModel:
    """Fit ``kind`` on the raw rows of ``m``; the input scaling is fitted here, on ``m`` only."""
    kind = ModelKind(kind)
    cfg = cfg if cfg is not None else default_config(kind)
    if len(m) < 2:
        raise DegenerateTrainingError("need at least two rows")
    if kind is not ModelKind.ANN and len(np.unique(m.labels)) < 2:
        raise DegenerateTrainingError("training data contains a single class")
    scaler = fit_scaling(m, cfg.scaling)
    X = apply_scaler(m, scaler).X if scaler is not None else m.X
    params, info = _TRAINERS[kind](X, m.labels, cfg)
    meta = {"seed": cfg.seed, "fold_id": fold_id, **info}
    return TrainedModel(kind, m.set_id, params, scaler, meta, tables)


def train_lr(m: FeatureMatrix, cfg=None) -> TrainedModel:
    return fit_model(m, ModelKind.LR, cfg)


def train_svm(m: FeatureMatrix, cfg=None) -> TrainedModel:
    return fit_model(m, ModelKind.SVM, cfg)


def train_elm(m: FeatureMatrix, cfg=None) -> TrainedModel:
    return fit_model(m, ModelKind.ELM, cfg)


def train_ann(m: FeatureMatrix, cfg=None) -> TrainedModel:
    return fit_model(m, ModelKind.ANN, cfg)


def evaluate_model(model: TrainedModel, m: FeatureMatrix, fold: int = -1) -> EvaluationReport:
    return evaluate(
        m.labels, model.predict_proba(m.X),
        model=model.kind.value, feature_set=m.set_id.value, fold=fold,
    )


def cross_validate(
    m: FeatureMatrix,
    kind: ModelKind | str,
    cfg=None,
    k: int = 10,
    seed: int = 0,
    threads: int = 1,
) -> list[EvaluationReport]:
    """One report per held-out fold; each fold's model and scaler see only its training rows."""
    kind = ModelKind(kind)
    plan = kfold(m, k, seed)

    def run(fold: int) -> EvaluationReport:
        model = fit_model(m.take(plan.train_indices(fold)), kind, cfg, fold_id=fold)
        return evaluate_model(model, m.take(plan.test_indices(fold)), fold)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(run, range(k)))
    return [run(f) for f in range(k)]
