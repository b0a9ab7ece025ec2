"""Single-feature manipulation sweeps over malicious rows, and robustness triage."""

from __future__ import annotations

import csv
import enum
import math
import os
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .assembly import FeatureMatrix
from .classifiers.base import TrainedModel
from .errors import InvalidInputError
from .model import ALL_COLUMNS, TTL_MAX

ROBUST_FLOOR = 0.9
SEMIROBUST_FLOOR = 0.6

# Values an attacker could plausibly set, per feature.
SWEEP_RANGES: dict[str, tuple[float, float]] = {
    "length": (4.0, 253.0),
    "consecutive": (1.0, 253.0),
    "entropy": (0.0, math.inf),
    "ip_count": (0.0, math.inf),
    "geo_count": (0.0, math.inf),
    "ttl_mean": (0.0, float(TTL_MAX)),
    "ttl_std": (0.0, float(TTL_MAX)),
    "lifetime": (0.0, math.inf),
    "active": (0.0, math.inf),
    "ssl_remaining": (0.0, math.inf),
    "ccr": (0.0, math.inf),
    "car": (0.0, math.inf),
    "pdns_changes": (0.0, math.inf),
}

_FIXED_GRIDS = {
    "length": (4, 60, 1),
    "consecutive": (1, 15, 1),
    "entropy": (0, 6, 0.1),
    "ip_count": (0, 50, 1),
    "geo_count": (0, 50, 1),
    "ttl_mean": (0, 120_000, 1000),
    "ttl_std": (0, 120_000, 1000),
    "lifetime": (0, 30, 1),
    "active": (0, 30, 1),
    "pdns_changes": (0, 500, 5),
    "ssl_remaining": (0, 4e7, 4e5),
}


class Verdict(str, enum.Enum):
    ROBUST = "Robust"
    SEMI_ROBUST = "SemiRobust"
    NON_ROBUST = "NonRobust"
    NOT_IN_SET = "NotInSet"


def _check_feature(name: str) -> None:
    if name not in ALL_COLUMNS:
        raise InvalidInputError(f"unknown feature {name!r}")


def default_grid(feature: str, train_values: Optional[np.ndarray] = None, points: int = 101) -> tuple[float, ...]:
    """Default sweep grid; CCR/CAR run from 0 to the 99th percentile of ``train_values``."""
    _check_feature(feature)
    if feature in ("ccr", "car"):
        if train_values is None or len(train_values) == 0:
            raise InvalidInputError(f"grid for {feature} needs training values")
        top = float(np.percentile(np.asarray(train_values, dtype=float), 99))
        return tuple(float(v) for v in np.linspace(0.0, max(top, 0.0), points))
    start, stop, step = _FIXED_GRIDS[feature]
    count = int(round((stop - start) / step)) + 1
    return tuple(float(start + i * step) for i in range(count))


@dataclass(frozen=True)
class SweepSpec:
    feature_name: str
    values: tuple[float, ...]

    def __post_init__(self):
        _check_feature(self.feature_name)
        if len(self.values) == 0:
            raise InvalidInputError("sweep grid is empty")
        lo, hi = SWEEP_RANGES[self.feature_name]
        bad = [v for v in self.values if not (lo <= v <= hi)]
        if bad:
            raise InvalidInputError(f"{self.feature_name}: grid values outside [{lo}, {hi}]: {bad[:3]}")


@dataclass(frozen=True)
class SweepResult:
    feature_name: str
    values: tuple[float, ...]
    detection_rates: tuple[float, ...]
    baseline_rate: float
    verdict: Verdict

    @property
    def min_rate(self) -> float:
        return min(self.detection_rates)


def triage(
    result: SweepResult,
    robust_floor: float = ROBUST_FLOOR,
    semirobust_floor: float = SEMIROBUST_FLOOR,
) -> Verdict:
    if not (0 < semirobust_floor <= robust_floor < 1):
        raise InvalidInputError("floors must satisfy 0 < semirobust_floor <= robust_floor < 1")
    if result.verdict is Verdict.NOT_IN_SET:
        return Verdict.NOT_IN_SET
    low = result.min_rate
    if low >= robust_floor * result.baseline_rate:
        return Verdict.ROBUST
    if low >= semirobust_floor * result.baseline_rate:
        return Verdict.SEMI_ROBUST
    return Verdict.NON_ROBUST


def sweep(
    model: TrainedModel,
    matrix: FeatureMatrix,
    spec: SweepSpec,
    robust_floor: float = ROBUST_FLOOR,
    semirobust_floor: float = SEMIROBUST_FLOOR,
) -> SweepResult:
    """Overwrite one raw feature on every malicious row with each grid value and re-predict.

    Benign rows of ``matrix`` are ignored.
    """
    if matrix.set_id != model.set_id:
        raise InvalidInputError(f"matrix set {matrix.set_id.value} != model set {model.set_id.value}")
    X = matrix.X[matrix.labels == 1]
    if len(X) == 0:
        raise InvalidInputError("no malicious rows to manipulate")
    baseline = float(np.mean(model.predict(X)))
    columns = matrix.feature_names
    if spec.feature_name not in columns:
        rates = tuple(baseline for _ in spec.values)
        return SweepResult(spec.feature_name, spec.values, rates, baseline, Verdict.NOT_IN_SET)
    col = columns.index(spec.feature_name)
    rates = []
    for v in spec.values:
        Xv = X.copy()
        Xv[:, col] = v
        rates.append(float(np.mean(model.predict(Xv))))
    draft = SweepResult(spec.feature_name, spec.values, tuple(rates), baseline, Verdict.ROBUST)
    return SweepResult(
        spec.feature_name, spec.values, tuple(rates), baseline,
        triage(draft, robust_floor, semirobust_floor),
    )


def write_sweep_csv(result: SweepResult, path: str | os.PathLike) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["value", "detection_rate"])
        for v, r in zip(result.values, result.detection_rates):
            w.writerow([repr(float(v)), repr(float(r))])


def sweep_all(
    model: TrainedModel,
    matrix: FeatureMatrix,
    features: Sequence[str],
    train_matrix: Optional[FeatureMatrix] = None,
) -> list[SweepResult]:
    """Sweep each feature on its default grid; CCR/CAR grids come from ``train_matrix`` (or ``matrix``)."""
    ref = train_matrix if train_matrix is not None else matrix
    out = []
    for name in features:
        values = None
        if name in ref.feature_names:
            values = ref.X[:, ref.feature_names.index(name)]
        if name in ("ccr", "car"):
            grid = default_grid(name, values) if values is not None else (0.0,)
        else:
            grid = default_grid(name)
        out.append(sweep(model, matrix, SweepSpec(name, grid)))
    return out
