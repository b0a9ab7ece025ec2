"""Trained-model container, per-kind configuration and persistence."""

from __future__ import annotations

import enum
import json
import os
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from ..assembly import QuantileScaler, Scaler
from ..errors import InvalidInputError, SchemaError
from ..model import FeatureSetId
from ..ratio_tables import TablePair, dumps_table, loads_table

MODEL_FORMAT = "robustdomain-model"
MODEL_VERSION = 1
DECISION_THRESHOLD = 0.5


class ModelKind(str, enum.Enum):
    LR = "lr"
    SVM = "svm"
    ELM = "elm"
    ANN = "ann"


@dataclass(frozen=True)
class LRConfig:
    degree: int = 3
    C: float = 1.0  # inverse L2 strength, penalty ||w||^2 / (2 C n)
    max_iter: int = 500
    gtol: float = 1e-6
    solver: str = "lbfgs"  # or "gd"
    gd_learning_rate: float = 0.5
    scaling: str = "quantile"  # "standard", "quantile" or "none"
    seed: int = 0


@dataclass(frozen=True)
class SVMConfig:
    gamma: float = 2.0
    C: float = 1.0
    kernel: str = "rbf"  # or "poly"
    degree: int = 3  # used only by the polynomial kernel
    tol: float = 1e-3
    max_iter: int = 1_000_000
    platt_folds: int = 3
    scaling: str = "quantile"  # "standard", "quantile" or "none"
    seed: int = 0


@dataclass(frozen=True)
class ELMConfig:
    hidden: int = 128
    ridge: float = 1e-3
    activation: str = "sigmoid"  # or "relu"
    scaling: str = "quantile"  # "standard", "quantile" or "none"
    seed: int = 0


@dataclass(frozen=True)
class ANNConfig:
    hidden: tuple[int, ...] = (64, 32, 16)
    learning_rate: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    batch_size: int = 150
    epochs: int = 100
    patience: int = 10
    min_rel_improvement: float = 1e-3
    validation_fraction: float = 0.1  # held out for the plateau check; 0 monitors training loss
    leaky_slope: float = 0.01
    scaling: str = "quantile"  # "standard", "quantile" or "none"
    seed: int = 0


CONFIG_TYPES = {
    ModelKind.LR: LRConfig,
    ModelKind.SVM: SVMConfig,
    ModelKind.ELM: ELMConfig,
    ModelKind.ANN: ANNConfig,
}


def default_config(kind: ModelKind | str, **overrides):
    return CONFIG_TYPES[ModelKind(kind)](**overrides)


def _proba_fn(kind: ModelKind):
    from . import ann, elm, logistic, svm

    return {
        ModelKind.LR: logistic.predict_proba,
        ModelKind.SVM: svm.predict_proba,
        ModelKind.ELM: elm.predict_proba,
        ModelKind.ANN: ann.predict_proba,
    }[kind]


@dataclass(frozen=True)
class TrainedModel:
    kind: ModelKind
    set_id: FeatureSetId
    params: dict
    scaler: Optional[Scaler | QuantileScaler] = None
    meta: dict = field(default_factory=dict)
    tables: Optional[TablePair] = None

    @property
    def feature_names(self) -> tuple[str, ...]:
        return self.set_id.columns

    def _prepare(self, rows) -> np.ndarray:
        X = np.asarray(rows, dtype=float)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.ndim != 2 or X.shape[1] != len(self.set_id.columns):
            raise InvalidInputError(
                f"model expects {len(self.set_id.columns)} columns, got shape {X.shape}"
            )
        return self.scaler.transform(X) if self.scaler is not None else X

    def predict_proba(self, rows) -> np.ndarray:
        """Probability of the malicious class for raw (unscaled) feature rows."""
        p = _proba_fn(self.kind)(self.params, self._prepare(rows))
        return np.clip(p, 0.0, 1.0)

    def predict(self, rows) -> np.ndarray:
        return (self.predict_proba(rows) >= DECISION_THRESHOLD).astype(np.int64)


# -- persistence -------------------------------------------------------------


def _array_to_json(a: np.ndarray) -> dict:
    a = np.asarray(a)
    return {"dtype": str(a.dtype), "shape": list(a.shape), "data": a.ravel().tolist()}


def _array_from_json(d: dict) -> np.ndarray:
    return np.array(d["data"], dtype=d["dtype"]).reshape(d["shape"])


def model_to_dict(m: TrainedModel) -> dict:
    out = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "kind": m.kind.value,
        "set_id": m.set_id.value,
        "params": {k: _array_to_json(v) for k, v in sorted(m.params.items())},
        "scaler": None,
        "meta": m.meta,
        "tables": None,
    }
    if isinstance(m.scaler, Scaler):
        out["scaler"] = {
            "type": "standard",
            "mean": _array_to_json(m.scaler.mean),
            "std": _array_to_json(m.scaler.std),
        }
    elif isinstance(m.scaler, QuantileScaler):
        out["scaler"] = {"type": "quantile", "knots": [_array_to_json(k) for k in m.scaler.knots]}
    if m.tables is not None:
        out["tables"] = {"countries": dumps_table(m.tables.countries), "asns": dumps_table(m.tables.asns)}
    return out


def model_from_dict(d: dict) -> TrainedModel:
    if d.get("format") != MODEL_FORMAT:
        raise SchemaError("not a model file")
    if d.get("version") != MODEL_VERSION:
        raise SchemaError(f"unsupported model version {d.get('version')}")
    try:
        scaler = None
        sd = d["scaler"]
        if sd is not None and sd["type"] == "standard":
            scaler = Scaler(_array_from_json(sd["mean"]), _array_from_json(sd["std"]))
        elif sd is not None and sd["type"] == "quantile":
            scaler = QuantileScaler(tuple(_array_from_json(k) for k in sd["knots"]))
        elif sd is not None:
            raise SchemaError(f"unknown scaler type {sd['type']!r}")
        tables = None
        if d["tables"] is not None:
            tables = TablePair(loads_table(d["tables"]["countries"]), loads_table(d["tables"]["asns"]))
        return TrainedModel(
            kind=ModelKind(d["kind"]),
            set_id=FeatureSetId(d["set_id"]),
            params={k: _array_from_json(v) for k, v in d["params"].items()},
            scaler=scaler,
            meta=d["meta"],
            tables=tables,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed model file: {exc}") from None


def save_model(m: TrainedModel, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(m), fh, indent=1)
        fh.write("\n")


def load_model(path: str | os.PathLike) -> TrainedModel:
    with open(path, encoding="utf-8") as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"model file is not valid JSON: {exc}") from None
    return model_from_dict(d)


def config_to_dict(cfg) -> dict:
    return asdict(cfg)
