import os

import numpy as np
import pytest

from robustdomain.experiment import (
    ExperimentConfig,
    format_summary,
    prepare,
    report_files,
    run_experiment,
    tables_text,
    write_reports,
)
from robustdomain.robustness import Verdict

SMALL = ExperimentConfig(
    seed=3, n_records=900, folds=3, models=("lr", "elm"), feature_sets=("B", "BRTCP"), bayes_samples=20_000,
)


@pytest.fixture(scope="module")
def small():
    data = prepare(SMALL)
    return data, run_experiment(SMALL, data)


def test_pool_layout(small):
    data, _ = small
    s = data.split
    assert len(data.features) == len(s.model_pool) == len(data.labels)
    assert np.intersect1d(s.ratio_pool, s.model_pool).size == 0
    pos = data.pool_positions(s.test)
    assert np.array_equal(s.model_pool[pos], s.test)


def test_reports_cover_grid(small):
    _, result = small
    assert set(result.reports) == {(f, m) for f in SMALL.feature_sets for m in SMALL.models}
    assert all(len(reps) == SMALL.folds for reps in result.reports.values())
    for row in result.summary_rows():
        assert 0.0 <= row["accuracy"] <= 1.0
        assert row["gap"] == pytest.approx(row["bayes_accuracy"] - row["accuracy"])


def test_sweeps(small):
    _, result = small
    assert set(result.sweeps) == {"B", "BR"}
    assert result.sweeps["BR"].verdict is Verdict.NOT_IN_SET
    assert result.sweeps["B"].feature_name == "ttl_std"


def test_rerun_is_byte_identical(small):
    _, result = small
    assert report_files(run_experiment(SMALL)) == report_files(result)


def test_thread_count_does_not_change_results(small):
    _, result = small
    cfg = ExperimentConfig(**{**SMALL.__dict__, "threads": 2})
    files = report_files(run_experiment(cfg))
    assert files["cv_folds.csv"] == report_files(result)["cv_folds.csv"]


def test_write_reports(small, tmp_path):
    _, result = small
    written = write_reports(result, tmp_path)
    names = sorted(os.path.basename(p) for p in written)
    assert names == sorted(
        ["config.json", "cv_folds.csv", "summary.csv", "sweeps.csv", "sweep_B_ttl_std.csv", "sweep_BR_ttl_std.csv"]
    )
    assert all(os.path.getsize(p) > 0 for p in written)


def test_summary_text(small):
    data, result = small
    text = format_summary(result)
    assert text.count("\n") == len(result.reports) + len(result.sweeps)
    assert set(tables_text(data.tables)) == {"countries", "asns"}
