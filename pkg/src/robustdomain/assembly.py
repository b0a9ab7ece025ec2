"""Turn records into numeric matrices for the five named feature sets."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .base_features import extract_base
from .errors import ConfigurationError
from .model import (
    ALL_COLUMNS,
    DomainRecord,
    FeatureSetId,
    FeatureVector,
    Label,
)
from .novel_features import DEFAULT_EPSILON, extract_novel
from .ratio_tables import TablePair

STD_FLOOR = 1e-9


@dataclass(frozen=True)
class Scaler:
    mean: np.ndarray
    std: np.ndarray

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.mean) / self.std


@dataclass(frozen=True)
class QuantileScaler:
    """Maps each column to its empirical mid-rank CDF over the fitted rows, in [0, 1].

    Ties share one value, so point masses (e.g. many zeros) stay a single level.
    Values outside the fitted range saturate at 0 or 1.
    """

    knots: tuple[np.ndarray, ...]  # sorted training values per column

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        out = np.empty_like(X)
        for j, s in enumerate(self.knots):
            lo = np.searchsorted(s, X[:, j], side="left")
            hi = np.searchsorted(s, X[:, j], side="right")
            out[:, j] = (lo + hi) / (2.0 * len(s))
        return out


SCALINGS = ("standard", "quantile", "none")


@dataclass(frozen=True)
class FeatureMatrix:
    """Rows of one feature set plus their labels (1 = malicious)."""

    set_id: FeatureSetId
    X: np.ndarray
    labels: np.ndarray
    scaler: Optional[object] = None

    def __post_init__(self):
        if self.X.shape[0] != self.labels.shape[0]:
            raise ValueError("row/label count mismatch")
        if self.X.ndim != 2 or self.X.shape[1] != len(self.set_id.columns):
            raise ValueError(f"expected {len(self.set_id.columns)} columns for {self.set_id.value}")

    @property
    def feature_names(self) -> tuple[str, ...]:
        return self.set_id.columns

    def __len__(self) -> int:
        return self.X.shape[0]

    def row(self, i: int) -> FeatureVector:
        return FeatureVector(self.set_id, tuple(float(v) for v in self.X[i]))

    def take(self, idx) -> "FeatureMatrix":
        return replace(self, X=self.X[idx], labels=self.labels[idx])


def full_feature_table(
    records: Sequence[DomainRecord],
    tables: Optional[TablePair] = None,
    epsilon: float = DEFAULT_EPSILON,
    entropy_base=2,
) -> np.ndarray:
    """All thirteen columns in ``ALL_COLUMNS`` order; novel columns are NaN without tables."""
    out = np.full((len(records), len(ALL_COLUMNS)), np.nan)
    for i, r in enumerate(records):
        out[i, :9] = extract_base(r, entropy_base).as_tuple()
        if tables is not None:
            out[i, 9:] = extract_novel(r, tables, epsilon).as_tuple()
    return out


def select_columns(full: np.ndarray, set_id: FeatureSetId) -> np.ndarray:
    idx = [ALL_COLUMNS.index(c) for c in set_id.columns]
    return full[:, idx]


def assemble(
    records: Sequence[DomainRecord],
    set_id: FeatureSetId | str,
    tables: Optional[TablePair] = None,
    epsilon: float = DEFAULT_EPSILON,
    entropy_base=2,
) -> FeatureMatrix:
    set_id = FeatureSetId(set_id)
    if set_id.uses_tables and tables is None:
        raise ConfigurationError(f"feature set {set_id.value} needs ratio tables")
    full = full_feature_table(records, tables if set_id.uses_tables else None, epsilon, entropy_base)
    X = select_columns(full, set_id)
    labels = np.array([int(r.label == Label.MALICIOUS) for r in records], dtype=np.int64)
    return FeatureMatrix(set_id, X, labels)


def fit_scaler(m: FeatureMatrix) -> Scaler:
    if len(m) == 0:
        width = m.X.shape[1]
        return Scaler(np.zeros(width), np.ones(width))
    mean = m.X.mean(axis=0)
    # summation rounding can move a constant column's mean off its value
    constant = np.ptp(m.X, axis=0) == 0
    mean[constant] = m.X[0, constant]
    std = np.maximum(m.X.std(axis=0), STD_FLOOR)
    return Scaler(mean, std)


def fit_quantile_scaler(m: FeatureMatrix) -> QuantileScaler:
    if len(m) == 0:
        raise ConfigurationError("cannot fit a quantile scaler on zero rows")
    return QuantileScaler(tuple(np.sort(m.X[:, j]) for j in range(m.X.shape[1])))


def fit_scaling(m: FeatureMatrix, scaling: str):
    """Fit the named preprocessing on ``m``; ``"none"`` returns ``None``."""
    if scaling == "standard":
        return fit_scaler(m)
    if scaling == "quantile":
        return fit_quantile_scaler(m)
    if scaling == "none":
        return None
    raise ConfigurationError(f"unknown scaling {scaling!r}; expected one of {SCALINGS}")


def apply_scaler(m: FeatureMatrix, scaler) -> FeatureMatrix:
    return replace(m, X=scaler.transform(m.X), scaler=scaler)


def write_csv(m: FeatureMatrix, path: str | os.PathLike) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*m.feature_names, "label"])
        for x, y in zip(m.X, m.labels):
            w.writerow([repr(float(v)) for v in x] + [int(y)])


def read_csv(path: str | os.PathLike, set_id: FeatureSetId | str) -> FeatureMatrix:
    set_id = FeatureSetId(set_id)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    if tuple(header[:-1]) != set_id.columns or header[-1] != "label":
        raise ConfigurationError(f"CSV header does not match feature set {set_id.value}")
    X = np.array([[float(v) for v in row[:-1]] for row in body]).reshape(len(body), len(set_id.columns))
    y = np.array([int(row[-1]) for row in body], dtype=np.int64)
    return FeatureMatrix(set_id, X, y)
