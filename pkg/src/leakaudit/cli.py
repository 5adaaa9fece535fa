"""Command-line entry point.

Subcommands:
  synth   generate a synthetic cohort CSV (+ JSON sidecar)
  etl     extract a dataset from MIMIC-shaped CSV tables
  run     execute one or all experiment setups and write the report
  report  re-render the table from an existing report.json

Exit code 0 on success, 1 with a diagnostic on stderr for any error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import cohort_etl, config as cfgmod, synth
from .experiment import (ALL_SETUPS, RunConfig, SETUP_AFTER, SETUP_BEFORE,
                         SETUP_LEAKY_HOLDOUT, SETUP_NO_OVERSAMPLING,
                         render_payload, render_report, run_experiment)
from .forest import ForestConfig
from .resampling import AdasynConfig
from .tabular import read_dataset, write_dataset

_SETUP_ALIASES = {
    "i": SETUP_AFTER,
    "ii": SETUP_NO_OVERSAMPLING,
    "iii": SETUP_BEFORE,
    "holdout": SETUP_LEAKY_HOLDOUT,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="leakaudit",
                                     description="Audit oversampling/imputation leakage "
                                                 "in imbalanced-classification pipelines.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="generate a synthetic cohort dataset")
    p_synth.add_argument("--n-total", type=int, default=112)
    p_synth.add_argument("--n-minority", type=int, default=10)
    p_synth.add_argument("--n-binary", type=int, default=10)
    p_synth.add_argument("--n-numeric", type=int, default=10)
    p_synth.add_argument("--n-informative", type=int, default=4)
    p_synth.add_argument("--signal", type=float, default=1.0,
                         help="class mean shift on informative features")
    p_synth.add_argument("--missing-rate", type=float, default=0.1)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--out", type=Path, required=True, help="output directory")

    p_etl = sub.add_parser("etl", help="extract a dataset from MIMIC-shaped CSVs")
    p_etl.add_argument("--data-dir", type=Path, required=True,
                       help="directory holding the six relational CSV files")
    p_etl.add_argument("--config", type=Path, default=None,
                       help="key-value config with schema map and feature key lists")
    p_etl.add_argument("--out", type=Path, required=True, help="output directory")

    p_run = sub.add_parser("run", help="run experiment setups on a dataset CSV")
    p_run.add_argument("--data", type=Path, required=True, help="dataset CSV")
    p_run.add_argument("--setup", choices=["i", "ii", "iii", "holdout", "all"], default="all")
    p_run.add_argument("--folds", type=int, default=None)
    p_run.add_argument("--seed", type=int, default=None, help="master seed")
    p_run.add_argument("--repeats", type=int, default=None)
    p_run.add_argument("--beta", type=float, default=None, help="oversampling balance level")
    p_run.add_argument("--k-neighbors", type=int, default=None)
    p_run.add_argument("--trees", type=int, default=None)
    p_run.add_argument("--config", type=Path, default=None, help="key-value config file")
    p_run.add_argument("--out", type=Path, required=True, help="output directory")

    p_report = sub.add_parser("report", help="render the table from a report.json")
    p_report.add_argument("report_json", type=Path, help="existing report.json")
    p_report.add_argument("--out", type=Path, required=True, help="output directory")
    return parser


def _cmd_synth(args) -> int:
    cfg = synth.SynthConfig(
        n_total=args.n_total,
        n_minority=args.n_minority,
        n_binary_features=args.n_binary,
        n_numeric_features=args.n_numeric,
        n_informative=args.n_informative,
        signal_strength=args.signal,
        missing_rate=args.missing_rate,
        seed=args.seed,
    )
    ds = synth.generate_cohort(cfg)
    args.out.mkdir(parents=True, exist_ok=True)
    path = args.out / "dataset.csv"
    write_dataset(ds, path)
    print(f"wrote {path} ({ds.n_rows} rows, {ds.class_counts()[1]} positives)")
    return 0


def _cmd_etl(args) -> int:
    values = cfgmod.parse_config(args.config) if args.config else {}
    schema = cfgmod.schema_from_config(values)
    cohort_cfg = cfgmod.cohort_config_from_config(values)
    tables = cohort_etl.load_tables(args.data_dir, schema)
    cohort = cohort_etl.extract_cohort(tables, cohort_cfg)
    ds = cohort_etl.build_dataset(cohort, tables, cohort_cfg)
    args.out.mkdir(parents=True, exist_ok=True)
    path = args.out / "dataset.csv"
    write_dataset(ds, path)
    counts = ds.class_counts()
    print(f"cohort: {ds.n_rows} patients, {counts[1]} long-stay, {counts[0]} short-stay")
    print(f"wrote {path}")
    return 0


def _run_config(args, values: dict, setup: str) -> RunConfig:
    # precedence: defaults < config file < CLI flags
    folds = args.folds if args.folds is not None else cfgmod.get_int(values, "run.folds", 10)
    seed = args.seed if args.seed is not None else cfgmod.get_int(values, "run.seed", 0)
    repeats = args.repeats if args.repeats is not None else cfgmod.get_int(values, "run.repeats", 1)
    beta = args.beta if args.beta is not None else cfgmod.get_float(values, "adasyn.beta", 1.0)
    k = (args.k_neighbors if args.k_neighbors is not None
         else cfgmod.get_int(values, "adasyn.k_neighbors", 5))
    trees = args.trees if args.trees is not None else cfgmod.get_int(values, "forest.trees", 100)
    max_depth = cfgmod.get_int(values, "forest.max_depth", None)
    min_leaf = cfgmod.get_int(values, "forest.min_leaf", 1)
    mtry = cfgmod.get_int(values, "forest.mtry", None)
    bootstrap = cfgmod.get_bool(values, "forest.bootstrap", True)
    fraction = cfgmod.get_float(values, "run.holdout_test_fraction", 0.30)
    return RunConfig(
        setup=setup,
        folds=folds,
        holdout_test_fraction=fraction,
        adasyn=AdasynConfig(k_neighbors=k, beta=beta, seed=seed),
        forest=ForestConfig(n_trees=trees, max_depth=max_depth, min_leaf=min_leaf,
                            mtry=mtry, bootstrap=bootstrap, seed=seed),
        master_seed=seed,
        repeats=repeats,
    )


def _cmd_run(args) -> int:
    values = cfgmod.parse_config(args.config) if args.config else {}
    ds = read_dataset(args.data)
    setups = ALL_SETUPS if args.setup == "all" else (_SETUP_ALIASES[args.setup],)
    reports = []
    for setup in setups:
        cfg = _run_config(args, values, setup)
        reports.append(run_experiment(ds, cfg))
    paths = render_report(reports, args.out)
    print(f"wrote {paths['json']} and {paths['markdown']}")
    with open(paths["markdown"]) as fh:
        print(fh.read(), end="")
    return 0


def _cmd_report(args) -> int:
    with open(args.report_json) as fh:
        payload = json.load(fh)
    for key in ("config", "dataset_fingerprint", "setups"):
        if key not in payload:
            raise ValueError(f"{args.report_json}: missing {key!r}")
    paths = render_payload(payload, args.out)
    print(f"wrote {paths['json']} and {paths['markdown']}")
    return 0


_COMMANDS = {
    "synth": _cmd_synth,
    "etl": _cmd_etl,
    "run": _cmd_run,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"leakaudit {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
