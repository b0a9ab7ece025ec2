"""Command-line front end.

Every command writes its outputs plus ``manifest.json`` into ``--out``.
Exit codes: 0 success, 1 runtime fault, 2 configuration error, 3 invalid data.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import platform
import sys
from typing import Optional, Sequence

import numpy as np
import scipy

from . import __version__
from .assembly import assemble
from .classifiers import ModelKind, cross_validate, default_config, fit_model, load_model, save_model
from .classifiers.training import evaluate_model
from .data_io import load_records, save_records, split
from .errors import ConfigurationError, InvalidInputError, RobustDomainError, SchemaError
from .experiment import ExperimentConfig, format_summary, run_experiment, write_reports
from .generator import GeneratorSpec, generate, load_spec
from .metrics import mean_report, reports_to_csv, reports_to_json
from .model import ALL_COLUMNS, FeatureSetId
from .novel_features import DEFAULT_EPSILON
from .ratio_tables import DEFAULT_THRESHOLD, TableKind, build_tables, save_table
from .robustness import SweepSpec, default_grid, sweep, write_sweep_csv

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG, EXIT_DATA = 0, 1, 2, 3

log = logging.getLogger("robustdomain")


class DataError(RobustDomainError):
    """Input data failed validation."""


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(out_dir: str, args: argparse.Namespace, outputs: Sequence[str]) -> str:
    """Record the command, its options and output digests; no timestamps, so reruns match."""
    options = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    manifest = {
        "command": args.command,
        "options": options,
        "seed": getattr(args, "seed", None),
        "versions": {
            "robustdomain": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        "outputs": {os.path.basename(p): _sha256(p) for p in sorted(outputs)},
    }
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _load_dataset(path: str, skip_invalid: bool):
    try:
        result = load_records(path)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    except SchemaError as exc:
        raise DataError(f"{path}: {exc}") from None
    if result.errors:
        sys.stderr.write(result.error_report())
        if not skip_invalid:
            raise DataError(f"{path}: {len(result.errors)} invalid record(s)")
        log.warning("skipped %d invalid record(s)", len(result.errors))
    if not result.records:
        raise DataError(f"{path}: no records")
    return result.records


def _split_and_tables(args, records):
    try:
        parts = split(records, args.ratio_fraction, args.seed)
    except InvalidInputError as exc:
        raise DataError(str(exc)) from None
    tables = build_tables([records[i] for i in parts.ratio_pool], args.threshold)
    return parts, tables


def _write(path: str, text: str) -> str:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


# -- commands -------------------------------------------------------------------


def cmd_generate(args) -> list[str]:
    try:
        spec = load_spec(args.spec) if args.spec else GeneratorSpec()
    except OSError as exc:
        raise ConfigurationError(f"cannot read spec: {exc}") from None
    if args.seed is not None:
        spec.seed = args.seed
    if args.n_records is not None:
        spec.n_records = args.n_records
    spec.validate()
    path = os.path.join(args.out, "records.jsonl")
    save_records(generate(spec), path)
    return [path, _write(os.path.join(args.out, "generator_spec.json"), spec.to_json())]


def cmd_build_tables(args) -> list[str]:
    records = _load_dataset(args.dataset, args.skip_invalid)
    _, tables = _split_and_tables(args, records)
    out = []
    for kind in args.kind:
        table = tables.countries if kind == TableKind.COUNTRIES.value else tables.asns
        path = os.path.join(args.out, f"{kind}_table.tsv")
        save_table(table, path)
        out.append(path)
    return out


def cmd_train(args) -> list[str]:
    records = _load_dataset(args.dataset, args.skip_invalid)
    parts, tables = _split_and_tables(args, records)
    set_id = FeatureSetId(args.feature_set)
    pool = [records[i] for i in parts.model_pool]
    m = assemble(pool, set_id, tables, args.epsilon)
    cfg = default_config(args.model, seed=args.seed)
    reports = cross_validate(m, args.model, cfg, args.folds, args.seed, args.threads)
    model = fit_model(m, args.model, cfg, tables=tables if set_id.uses_tables else None)
    model_path = os.path.join(args.out, "model.json")
    save_model(model, model_path)
    summary = {"feature_set": set_id.value, "model": args.model, **mean_report(reports)}
    print(json.dumps(summary, indent=2))
    return [
        model_path,
        _write(os.path.join(args.out, "cv_folds.csv"), reports_to_csv(reports)),
        _write(os.path.join(args.out, "cv_summary.json"), json.dumps(summary, indent=2) + "\n"),
    ]


def _model_and_matrix(args):
    try:
        model = load_model(args.model_path)
    except OSError as exc:
        raise DataError(f"cannot read {args.model_path}: {exc}") from None
    except SchemaError as exc:
        raise DataError(f"{args.model_path}: {exc}") from None
    records = _load_dataset(args.dataset, args.skip_invalid)
    if model.set_id.uses_tables and model.tables is None:
        raise ConfigurationError(f"model for {model.set_id.value} carries no ratio tables")
    m = assemble(records, model.set_id, model.tables, args.epsilon)
    return model, m


def cmd_evaluate(args) -> list[str]:
    model, m = _model_and_matrix(args)
    report = evaluate_model(model, m)
    text = reports_to_json([report]) + "\n"
    print(text, end="")
    return [_write(os.path.join(args.out, "report.json"), text)]


def _parse_grid(text: str) -> tuple[float, ...]:
    try:
        start, stop, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise ConfigurationError(f"grid must be start:stop:step, got {text!r}") from None
    if step <= 0 or stop < start:
        raise ConfigurationError("grid needs step > 0 and stop >= start")
    count = int(round((stop - start) / step)) + 1
    return tuple(start + i * step for i in range(count))


def cmd_sweep(args) -> list[str]:
    model, m = _model_and_matrix(args)
    if args.grid:
        grid = _parse_grid(args.grid)
    elif args.feature in ("ccr", "car"):
        if args.feature not in m.feature_names:
            grid = (0.0,)
        else:
            grid = default_grid(args.feature, m.X[:, m.feature_names.index(args.feature)])
    else:
        grid = default_grid(args.feature)
    try:
        result = sweep(model, m, SweepSpec(args.feature, grid))
    except InvalidInputError as exc:
        raise ConfigurationError(str(exc)) from None
    csv_path = os.path.join(args.out, f"sweep_{args.feature}.csv")
    write_sweep_csv(result, csv_path)
    verdict = {
        "feature": result.feature_name,
        "baseline_rate": result.baseline_rate,
        "min_rate": result.min_rate,
        "verdict": result.verdict.value,
    }
    print(json.dumps(verdict, indent=2))
    return [csv_path, _write(os.path.join(args.out, "verdict.json"), json.dumps(verdict, indent=2) + "\n")]


def cmd_reproduce(args) -> list[str]:
    cfg = ExperimentConfig(
        seed=args.seed, n_records=args.n_records, ratio_fraction=args.ratio_fraction,
        folds=args.folds, threshold=args.threshold, epsilon=args.epsilon, threads=args.threads,
    )
    result = run_experiment(cfg)
    print(format_summary(result))
    return write_reports(result, args.out)


# -- parser ---------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, seed_default: Optional[int] = 0) -> None:
    p.add_argument("--seed", type=int, default=seed_default)
    p.add_argument("--threads", type=int, default=1, help="parallel folds (default 1)")
    p.add_argument("--out", required=True, help="output directory")


def _protocol(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ratio-fraction", type=float, default=0.75, choices=(0.75, 0.25),
                   help="share of records used to build ratio tables")
    p.add_argument("--threshold", type=int, default=DEFAULT_THRESHOLD, help="minimum occurrences for a table entry")
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)


def _dataset(p: argparse.ArgumentParser) -> None:
    p.add_argument("dataset", help="records file (JSON lines)")
    p.add_argument("--skip-invalid", action="store_true", help="drop invalid records instead of failing")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="robustdomain", description="Malicious domain detection toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic records file")
    p.add_argument("--spec", help="generator spec JSON (defaults when omitted)")
    p.add_argument("--n-records", type=int)
    _common(p, seed_default=None)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("build-tables", help="build ratio tables from the ratio pool")
    _dataset(p)
    p.add_argument("--kind", nargs="+", choices=[k.value for k in TableKind], default=[k.value for k in TableKind])
    _protocol(p)
    _common(p)
    p.set_defaults(func=cmd_build_tables)

    p = sub.add_parser("train", help="cross-validate and fit one model")
    _dataset(p)
    p.add_argument("--feature-set", required=True, choices=[s.value for s in FeatureSetId])
    p.add_argument("--model", required=True, choices=[k.value for k in ModelKind])
    p.add_argument("--folds", type=int, default=10)
    _protocol(p)
    _common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="score a saved model on a records file")
    p.add_argument("model_path")
    _dataset(p)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    _common(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="manipulate one feature on malicious rows")
    p.add_argument("model_path")
    _dataset(p)
    p.add_argument("--feature", required=True, choices=ALL_COLUMNS)
    p.add_argument("--grid", help="start:stop:step (default grid per feature when omitted)")
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    _common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reproduce", help="full synthetic experiment with reports")
    p.add_argument("--n-records", type=int, default=6700)
    p.add_argument("--folds", type=int, default=10)
    _protocol(p)
    _common(p)
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")
    try:
        if args.threads < 1:
            raise ConfigurationError("--threads must be >= 1")
        os.makedirs(args.out, exist_ok=True)
        outputs = args.func(args)
        write_manifest(args.out, args, outputs)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
