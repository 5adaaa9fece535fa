"""The three cross-validated setups and the leaky 70/30 holdout.

Setups, on the same dataset and derived seeds:

* ``after_partitioning``  - fold first; fit the imputer on the training
  rows only, oversample the imputed training rows only, score the
  untouched test fold (the correct pipeline);
* ``no_oversampling``     - same, minus oversampling;
* ``before_partitioning`` - impute and oversample the entire dataset,
  then fold the augmented data (the leaky pipeline under audit);
* ``leaky_holdout``       - impute and oversample everything, then take a
  single stratified holdout split (the balance-then-split mistake).

Every stochastic choice is seeded from ``master_seed`` through labeled
derivation, so identical configs give identical reports and the setups
share fold plans wherever their shapes allow.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .evaluation import (FoldResult, UndefinedAUROCError, auroc, confusion_matrix,
                         contamination_check, stratified_kfold, summarize)
from .forest import ForestConfig, predict_proba, train_forest
from .resampling import AdasynConfig, adasyn
from .seeding import derive_seed
from .tabular import Dataset, ORIGINAL, apply_imputer, fit_imputer

SETUP_AFTER = "after_partitioning"
SETUP_NO_OVERSAMPLING = "no_oversampling"
SETUP_BEFORE = "before_partitioning"
SETUP_LEAKY_HOLDOUT = "leaky_holdout"

CV_SETUPS = (SETUP_AFTER, SETUP_NO_OVERSAMPLING, SETUP_BEFORE)
ALL_SETUPS = CV_SETUPS + (SETUP_LEAKY_HOLDOUT,)

# fixed row order for rendered tables: the three CV setups, then the holdout
_SETUP_LABELS = {
    SETUP_AFTER: "(i) imputation + oversampling after partitioning",
    SETUP_NO_OVERSAMPLING: "(ii) no oversampling",
    SETUP_BEFORE: "(iii) imputation + oversampling before partitioning",
    SETUP_LEAKY_HOLDOUT: "leaky 70/30 holdout (balanced before splitting)",
}


@dataclass(frozen=True)
class RunConfig:
    setup: str = SETUP_AFTER
    folds: int = 10
    holdout_test_fraction: float = 0.30
    adasyn: AdasynConfig = AdasynConfig()
    forest: ForestConfig = ForestConfig()
    master_seed: int = 0
    repeats: int = 1

    def __post_init__(self):
        if self.setup not in ALL_SETUPS:
            raise ValueError(f"unknown setup {self.setup!r}; expected one of {ALL_SETUPS}")
        if self.folds < 2:
            raise ValueError("folds must be at least 2")
        if not 0 < self.holdout_test_fraction < 1:
            raise ValueError("holdout_test_fraction must be in (0, 1)")
        if self.repeats < 1:
            raise ValueError("repeats must be at least 1")

    def echo(self) -> dict:
        return {
            "setup": self.setup,
            "folds": self.folds,
            "holdout_test_fraction": self.holdout_test_fraction,
            "master_seed": self.master_seed,
            "repeats": self.repeats,
            "adasyn": {"k_neighbors": self.adasyn.k_neighbors, "beta": self.adasyn.beta},
            "forest": {
                "n_trees": self.forest.n_trees,
                "max_depth": self.forest.max_depth,
                "min_leaf": self.forest.min_leaf,
                "mtry": self.forest.mtry,
                "bootstrap": self.forest.bootstrap,
            },
        }


@dataclass(frozen=True)
class SetupReport:
    name: str
    folds: tuple[FoldResult, ...]
    mean_auroc: float | None
    std_auroc: float | None
    skipped: tuple[str, ...]


@dataclass(frozen=True)
class ExperimentReport:
    config: dict
    dataset_fingerprint: dict
    setups: tuple[SetupReport, ...]


def _check_input(ds: Dataset) -> None:
    if not (ds.provenance == ORIGINAL).all():
        raise ValueError("experiments start from an all-original dataset")
    counts = ds.class_counts()
    if counts[0] == 0 or counts[1] == 0:
        raise ValueError("both classes must be present")


def _evaluate_fold(train_ds, train_rows, eval_ds, eval_rows, forest_cfg,
                   original_counts, fold, repeat):
    model = train_forest(train_ds, train_rows, forest_cfg)
    scores = predict_proba(model, eval_ds, eval_rows)
    eval_y = eval_ds.y[eval_rows]
    score = auroc(scores, eval_y)  # may raise UndefinedAUROCError
    return FoldResult(
        auroc=score,
        confusion=confusion_matrix(scores, eval_y),
        contamination=contamination_check(eval_ds.provenance[eval_rows], eval_y,
                                          original_counts),
        fold=fold,
        repeat=repeat,
    )


def _summarize_setup(name, results, skipped) -> SetupReport:
    if results:
        stats = summarize([r.auroc for r in results])
        mean, std = stats["mean"], stats["std"]
    else:
        mean = std = None
    return SetupReport(name=name, folds=tuple(results), mean_auroc=mean,
                       std_auroc=std, skipped=tuple(skipped))


def run_setup(ds: Dataset, cfg: RunConfig) -> ExperimentReport:
    """Run one cross-validated setup; folds with one-class test sets are skipped."""
    if cfg.setup == SETUP_LEAKY_HOLDOUT:
        return run_leaky_holdout(ds, cfg)
    _check_input(ds)
    original_counts = ds.class_counts()
    all_rows = np.arange(ds.n_rows)

    results: list[FoldResult] = []
    skipped: list[str] = []
    for r in range(cfg.repeats):
        fold_seed = derive_seed(cfg.master_seed, "folds", r)
        if cfg.setup == SETUP_BEFORE:
            # leak on purpose: fit statistics and oversample on everything
            imputed = apply_imputer(ds, fit_imputer(ds, all_rows))
            aug = adasyn(imputed, all_rows,
                         replace(cfg.adasyn, seed=derive_seed(cfg.master_seed, "adasyn", r)))
            plan = stratified_kfold(aug.y, cfg.folds, fold_seed)
            work = aug
        else:
            plan = stratified_kfold(ds.y, cfg.folds, fold_seed)
            work = ds
        skipped.extend(f"repeat {r}: {w}" for w in plan.warnings)

        for f, test in enumerate(plan.folds):
            test = np.asarray(test, dtype=np.intp)
            test_y = work.y[test]
            if (test_y == 0).all() or (test_y == 1).all():
                skipped.append(f"repeat {r} fold {f}: AUROC undefined (single-class test fold)")
                continue
            train = np.setdiff1d(np.arange(work.n_rows), test)
            forest_cfg = replace(cfg.forest, seed=derive_seed(cfg.master_seed, "forest", r, f))
            try:
                if cfg.setup == SETUP_BEFORE:
                    result = _evaluate_fold(work, train, work, test, forest_cfg,
                                            original_counts, f, r)
                else:
                    imputed = apply_imputer(ds, fit_imputer(ds, train))
                    if cfg.setup == SETUP_AFTER:
                        aug = adasyn(imputed, train,
                                     replace(cfg.adasyn,
                                             seed=derive_seed(cfg.master_seed, "adasyn", r, f)))
                        result = _evaluate_fold(aug, np.arange(aug.n_rows), imputed, test,
                                                forest_cfg, original_counts, f, r)
                    else:
                        result = _evaluate_fold(imputed, train, imputed, test, forest_cfg,
                                                original_counts, f, r)
            except UndefinedAUROCError:
                skipped.append(f"repeat {r} fold {f}: AUROC undefined (single-class test fold)")
                continue
            results.append(result)

    return ExperimentReport(
        config=cfg.echo(),
        dataset_fingerprint=ds.fingerprint(),
        setups=(_summarize_setup(cfg.setup, results, skipped),),
    )


def _stratified_split(labels, test_fraction: float, seed: int):
    """Single stratified split; returns (train_rows, test_rows)."""
    y = np.asarray(labels)
    rng = np.random.default_rng(seed)
    train, test = [], []
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        rng.shuffle(idx)
        n_test = int(round(test_fraction * len(idx)))
        if len(idx) >= 2:
            n_test = min(max(n_test, 1), len(idx) - 1)
        else:
            n_test = 0  # a singleton class stays trainable
        test.extend(idx[:n_test])
        train.extend(idx[n_test:])
    return np.array(sorted(train), dtype=np.intp), np.array(sorted(test), dtype=np.intp)


def run_leaky_holdout(ds: Dataset, cfg: RunConfig) -> ExperimentReport:
    """Balance the whole dataset, then split: the flawed holdout under audit."""
    _check_input(ds)
    original_counts = ds.class_counts()
    all_rows = np.arange(ds.n_rows)

    results: list[FoldResult] = []
    skipped: list[str] = []
    for r in range(cfg.repeats):
        imputed = apply_imputer(ds, fit_imputer(ds, all_rows))
        aug = adasyn(imputed, all_rows,
                     replace(cfg.adasyn, seed=derive_seed(cfg.master_seed, "adasyn", r)))
        train, test = _stratified_split(aug.y, cfg.holdout_test_fraction,
                                        derive_seed(cfg.master_seed, "holdout", r))
        forest_cfg = replace(cfg.forest, seed=derive_seed(cfg.master_seed, "forest", r, 0))
        try:
            results.append(_evaluate_fold(aug, train, aug, test, forest_cfg,
                                          original_counts, 0, r))
        except UndefinedAUROCError:
            skipped.append(f"repeat {r}: AUROC undefined (single-class test side)")

    return ExperimentReport(
        config=cfg.echo(),
        dataset_fingerprint=ds.fingerprint(),
        setups=(_summarize_setup(SETUP_LEAKY_HOLDOUT, results, skipped),),
    )


def run_experiment(ds: Dataset, cfg: RunConfig) -> ExperimentReport:
    """Dispatch to the CV runner or the holdout runner based on ``cfg.setup``."""
    if cfg.setup == SETUP_LEAKY_HOLDOUT:
        return run_leaky_holdout(ds, cfg)
    return run_setup(ds, cfg)


# ---------------------------------------------------------------------------
# report rendering
# ---------------------------------------------------------------------------

def _contamination_to_dict(c) -> dict:
    return {
        "synthetic_rows_in_eval": c.synthetic_rows_in_eval,
        "eval_class_counts": {str(k): v for k, v in c.eval_class_counts.items()},
        "original_class_counts": {str(k): v for k, v in c.original_class_counts.items()},
        "flagged": c.flagged,
    }


def _setup_to_dict(s: SetupReport) -> dict:
    return {
        "name": s.name,
        "folds": [
            {
                "repeat": fr.repeat,
                "fold": fr.fold,
                "auroc": fr.auroc,
                "confusion": fr.confusion,
                "contamination": _contamination_to_dict(fr.contamination),
            }
            for fr in s.folds
        ],
        "mean_auroc": s.mean_auroc,
        "std_auroc": s.std_auroc,
        "skipped": list(s.skipped),
    }


def report_to_dict(reports) -> dict:
    """Merge one report per setup into the documented JSON layout."""
    reports = list(reports)
    if not reports:
        raise ValueError("at least one report is required")
    config = dict(reports[0].config)
    config.pop("setup", None)
    order = {name: i for i, name in enumerate(ALL_SETUPS)}
    setups = [s for rep in reports for s in rep.setups]
    setups.sort(key=lambda s: order.get(s.name, len(order)))
    return {
        "config": config,
        "dataset_fingerprint": dict(reports[0].dataset_fingerprint),
        "setups": [_setup_to_dict(s) for s in setups],
    }


def _format_pct(mean, std) -> str:
    if mean is None:
        return "n/a (all folds skipped)"
    return f"{100 * mean:.2f} ± {100 * std:.2f}"


def render_payload(payload: dict, out_dir) -> dict:
    """Write an already-assembled report dict as report.json + report.md."""
    if not payload.get("setups"):
        raise ValueError("report payload has no setups")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    json_path = out_dir / "report.json"
    with open(json_path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")

    lines = ["| Method | AUROC (in %) |", "| --- | --- |"]
    for s in payload["setups"]:
        label = _SETUP_LABELS.get(s["name"], s["name"])
        lines.append(f"| {label} | {_format_pct(s['mean_auroc'], s['std_auroc'])} |")
    md_path = out_dir / "report.md"
    md_path.write_text("\n".join(lines) + "\n")
    return {"json": json_path, "markdown": md_path}


def render_report(reports, out_dir) -> dict:
    """Write ``report.json`` and ``report.md`` under ``out_dir``.

    The markdown table has one row per setup, in the canonical (i), (ii),
    (iii) order with the holdout last; rendering the same reports twice
    produces identical bytes.
    """
    return render_payload(report_to_dict(reports), out_dir)
