"""End-to-end synthetic run: generate, build tables, cross-validate, sweep.

Everything is driven by one seed, and every report is written in a fixed
order with ``repr`` floats, so two runs with the same config produce
byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .assembly import FeatureMatrix, full_feature_table, select_columns
from .classifiers import cross_validate, default_config, fit_model
from .classifiers.base import TrainedModel
from .data_io import DatasetSplit, split
from .generator import GeneratorSpec, bayes_accuracy, generate
from .metrics import EvaluationReport, mean_report, reports_to_csv
from .model import ALL_COLUMNS, DomainRecord, FeatureSetId
from .novel_features import DEFAULT_EPSILON
from .ratio_tables import DEFAULT_THRESHOLD, TablePair, build_tables, dumps_table
from .robustness import SweepResult, SweepSpec, default_grid, sweep, write_sweep_csv

BAYES_MARGIN = 0.05


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    n_records: int = 6700
    ratio_fraction: float = 0.75
    folds: int = 10
    threshold: int = DEFAULT_THRESHOLD
    epsilon: float = DEFAULT_EPSILON
    models: tuple[str, ...] = ("lr", "svm", "elm", "ann")
    feature_sets: tuple[str, ...] = ("B", "BR", "TCP", "BRTCP", "BTCP")
    sweep_model: str = "ann"
    sweep_feature: str = "ttl_std"
    sweep_sets: tuple[str, ...] = ("B", "BR")
    bayes_samples: int = 400_000
    threads: int = 1

    def generator_spec(self) -> GeneratorSpec:
        return GeneratorSpec(
            n_records=self.n_records, seed=self.seed, threshold=self.threshold, epsilon=self.epsilon,
        )


@dataclass
class PreparedData:
    """Generated records, their split, ratio tables and the model-pool feature table."""

    records: list[DomainRecord]
    split: DatasetSplit
    tables: TablePair
    features: np.ndarray  # model-pool rows, all columns
    labels: np.ndarray

    def matrix(self, set_id: FeatureSetId | str, rows: Optional[np.ndarray] = None) -> FeatureMatrix:
        set_id = FeatureSetId(set_id)
        X, y = self.features, self.labels
        if rows is not None:
            X, y = X[rows], y[rows]
        return FeatureMatrix(set_id, select_columns(X, set_id), y)

    def pool_positions(self, indices: np.ndarray) -> np.ndarray:
        """Positions inside the model pool of record ``indices``."""
        return np.searchsorted(self.split.model_pool, indices)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    reports: dict = field(default_factory=dict)  # (set, model) -> list of fold reports
    bayes: dict = field(default_factory=dict)  # set -> Bayes accuracy
    sweeps: dict = field(default_factory=dict)  # set -> SweepResult
    sweep_models: dict = field(default_factory=dict)  # set -> TrainedModel

    def mean(self, set_id: str, model: str, metric: str = "accuracy") -> float:
        return mean_report(self.reports[(set_id, model)])[metric]

    def summary_rows(self) -> list[dict]:
        rows = []
        for (set_id, model), reps in self.reports.items():
            row = {"feature_set": set_id, "model": model, **mean_report(reps)}
            row["bayes_accuracy"] = self.bayes.get(set_id, float("nan"))
            row["gap"] = row["bayes_accuracy"] - row["accuracy"]
            rows.append(row)
        return rows


def prepare(cfg: ExperimentConfig) -> PreparedData:
    records = generate(cfg.generator_spec())
    parts = split(records, cfg.ratio_fraction, cfg.seed)
    tables = build_tables([records[i] for i in parts.ratio_pool], cfg.threshold)
    pool = [records[i] for i in parts.model_pool]
    features = full_feature_table(pool, tables, cfg.epsilon)
    labels = np.array([int(r.label) for r in pool], dtype=np.int64)
    return PreparedData(records, parts, tables, features, labels)


def run_cv(data: PreparedData, cfg: ExperimentConfig) -> dict:
    out = {}
    for set_id in cfg.feature_sets:
        m = data.matrix(set_id)
        for kind in cfg.models:
            model_cfg = default_config(kind, seed=cfg.seed)
            out[(set_id, kind)] = cross_validate(m, kind, model_cfg, cfg.folds, cfg.seed, cfg.threads)
    return out


def run_sweeps(data: PreparedData, cfg: ExperimentConfig) -> tuple[dict, dict]:
    """Fit ``sweep_model`` on the model-pool train rows and sweep on the test rows."""
    train = data.pool_positions(data.split.train)
    test = data.pool_positions(data.split.test)
    grid = default_grid(cfg.sweep_feature, data.features[train, ALL_COLUMNS.index(cfg.sweep_feature)])
    results, models = {}, {}
    for set_id in cfg.sweep_sets:
        model = fit_model(data.matrix(set_id, train), cfg.sweep_model, default_config(cfg.sweep_model, seed=cfg.seed))
        results[set_id] = sweep(model, data.matrix(set_id, test), SweepSpec(cfg.sweep_feature, grid))
        models[set_id] = model
    return results, models


def run_experiment(cfg: ExperimentConfig, data: Optional[PreparedData] = None) -> ExperimentResult:
    data = data if data is not None else prepare(cfg)
    result = ExperimentResult(cfg)
    result.reports = run_cv(data, cfg)
    spec = cfg.generator_spec()
    for set_id in cfg.feature_sets:
        result.bayes[set_id] = bayes_accuracy(spec, FeatureSetId(set_id).columns, cfg.bayes_samples)
    if cfg.sweep_sets:
        result.sweeps, result.sweep_models = run_sweeps(data, cfg)
    return result


# -- reports ------------------------------------------------------------------


def _rows_to_csv(rows: Sequence[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def report_files(result: ExperimentResult) -> dict[str, str]:
    """Report file name -> contents."""
    all_reports: list[EvaluationReport] = [r for reps in result.reports.values() for r in reps]
    files = {
        "config.json": json.dumps(asdict(result.config), indent=2, sort_keys=True) + "\n",
        "cv_folds.csv": reports_to_csv(all_reports),
        "summary.csv": _rows_to_csv(result.summary_rows()),
    }
    sweep_rows = []
    for set_id, s in result.sweeps.items():
        sweep_rows.append({
            "feature_set": set_id, "feature": s.feature_name, "baseline_rate": s.baseline_rate,
            "min_rate": s.min_rate, "verdict": s.verdict.value,
        })
    if sweep_rows:
        files["sweeps.csv"] = _rows_to_csv(sweep_rows)
    return files


def write_reports(result: ExperimentResult, out_dir: str | os.PathLike) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for name, text in report_files(result).items():
        path = os.path.join(out_dir, name)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        written.append(path)
    for set_id, s in result.sweeps.items():
        path = os.path.join(out_dir, f"sweep_{set_id}_{s.feature_name}.csv")
        write_sweep_csv(s, path)
        written.append(path)
    return written


def format_summary(result: ExperimentResult) -> str:
    lines = [f"{'set':<6} {'model':<5} {'acc':>7} {'f1':>7} {'auc':>7} {'bayes':>7} {'gap':>7}"]
    for row in result.summary_rows():
        lines.append(
            f"{row['feature_set']:<6} {row['model']:<5} {row['accuracy']:7.4f} {row['f1']:7.4f} "
            f"{row['auc']:7.4f} {row['bayes_accuracy']:7.4f} {row['gap']:7.4f}"
        )
    for set_id, s in result.sweeps.items():
        lines.append(
            f"sweep {s.feature_name} on {set_id}: baseline {s.baseline_rate:.4f}, "
            f"min {s.min_rate:.4f}, {s.verdict.value}"
        )
    return "\n".join(lines)


def tables_text(tables: TablePair) -> dict[str, str]:
    return {"countries": dumps_table(tables.countries), "asns": dumps_table(tables.asns)}
