"""Confusion matrix and scalar metrics; malicious is the positive class."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np
from scipy.stats import rankdata

from .errors import InvalidInputError, UndefinedMetricError

logger = logging.getLogger(__name__)

PROB_CLIP = 1e-15

REPORT_FIELDS = (
    "model", "feature_set", "fold", "tp", "fp", "tn", "fn",
    "accuracy", "precision", "recall", "f1", "log_loss", "auc",
)


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class EvaluationReport:
    confusion: ConfusionMatrix
    accuracy: float
    precision: float
    recall: float
    f1: float
    log_loss: float
    auc: float
    model: str = ""
    feature_set: str = ""
    fold: int = -1

    def as_row(self) -> dict:
        row = {"model": self.model, "feature_set": self.feature_set, "fold": self.fold}
        row.update(asdict(self.confusion))
        for name in ("accuracy", "precision", "recall", "f1", "log_loss", "auc"):
            row[name] = getattr(self, name)
        return row


def _pair(labels, other) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(labels)
    o = np.asarray(other)
    if y.shape != o.shape or y.ndim != 1:
        raise InvalidInputError(f"length mismatch: {y.shape} vs {o.shape}")
    if y.size == 0:
        raise InvalidInputError("need at least one row")
    return y.astype(np.int64), o


def confusion(labels, predictions) -> ConfusionMatrix:
    y, p = _pair(labels, predictions)
    p = p.astype(np.int64)
    tp = int(np.sum((y == 1) & (p == 1)))
    fp = int(np.sum((y == 0) & (p == 1)))
    tn = int(np.sum((y == 0) & (p == 0)))
    fn = int(np.sum((y == 1) & (p == 0)))
    return ConfusionMatrix(tp, fp, tn, fn)


def _ratio(num: int, den: int, name: str) -> float:
    if den == 0:
        logger.warning("%s undefined (zero denominator); reporting 0", name)
        return 0.0
    return num / den


def recall(c: ConfusionMatrix) -> float:
    return _ratio(c.tp, c.tp + c.fn, "recall")


def precision(c: ConfusionMatrix) -> float:
    return _ratio(c.tp, c.tp + c.fp, "precision")


def accuracy(c: ConfusionMatrix) -> float:
    return _ratio(c.tp + c.tn, c.total, "accuracy")


def f1(c: ConfusionMatrix) -> float:
    p, r = precision(c), recall(c)
    if p + r == 0:
        return 0.0
    return 2 * p * r / (p + r)


def log_loss(labels, probabilities) -> float:
    """Mean binary cross-entropy with natural log, probabilities clipped to [1e-15, 1-1e-15]."""
    y, p = _pair(labels, probabilities)
    p = np.clip(p.astype(float), PROB_CLIP, 1 - PROB_CLIP)
    terms = y * np.log(p) + (1 - y) * np.log1p(-p)
    return -math.fsum(terms) / y.size


def auc(labels, probabilities) -> float:
    """Probability that a random positive outscores a random negative; ties count half."""
    y, s = _pair(labels, probabilities)
    n_pos = int(np.sum(y == 1))
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("AUC needs both classes")
    ranks = rankdata(s.astype(float))  # midranks for ties
    rank_sum = math.fsum(ranks[y == 1])
    return (rank_sum - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg)


def evaluate(labels, probabilities, threshold: float = 0.5, **meta) -> EvaluationReport:
    y = np.asarray(labels).astype(np.int64)
    p = np.asarray(probabilities, dtype=float)
    c = confusion(y, (p >= threshold).astype(np.int64))
    try:
        a = auc(y, p)
    except UndefinedMetricError:
        logger.warning("AUC undefined on a single-class fold; reporting NaN")
        a = float("nan")
    return EvaluationReport(
        confusion=c,
        accuracy=accuracy(c),
        precision=precision(c),
        recall=recall(c),
        f1=f1(c),
        log_loss=log_loss(y, p),
        auc=a,
        **meta,
    )


def reports_to_csv(reports: Sequence[EvaluationReport]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=REPORT_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.as_row().items()})
    return buf.getvalue()


def reports_to_json(reports: Sequence[EvaluationReport]) -> str:
    return json.dumps([r.as_row() for r in reports], indent=2)


def mean_report(reports: Sequence[EvaluationReport]) -> dict:
    """Per-metric mean over folds."""
    out = {}
    for name in ("accuracy", "precision", "recall", "f1", "log_loss", "auc"):
        out[name] = float(np.mean([getattr(r, name) for r in reports]))
    return out
