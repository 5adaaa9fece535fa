"""Stratified fold planning, ranking metrics, and contamination checks.

AUROC is the Mann-Whitney statistic (ties count half), which equals the
trapezoidal area under the ROC curve.  The contamination check is the
guard that makes oversampling leakage visible: an evaluation fold is
flagged as soon as it contains a synthetic row or more members of a class
than the original dataset ever had.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tabular import SYNTHETIC


class UndefinedAUROCError(ValueError):
    """Raised when AUROC is requested for single-class labels."""


@dataclass(frozen=True)
class FoldPlan:
    k: int
    folds: tuple[tuple[int, ...], ...]
    seed: int
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class ContaminationReport:
    synthetic_rows_in_eval: int
    eval_class_counts: dict
    original_class_counts: dict
    flagged: bool


@dataclass(frozen=True)
class FoldResult:
    auroc: float
    confusion: dict  # tp, fp, tn, fn
    contamination: ContaminationReport
    fold: int = 0
    repeat: int = 0


def stratified_kfold(labels, k: int, seed: int) -> FoldPlan:
    """Plan k disjoint, covering folds with per-class counts within 1.

    Each class is shuffled with the seeded generator and dealt round-robin
    over the folds.  If k exceeds the minority count a warning is recorded
    (some folds will have no positives); k > n is an error.
    """
    y = np.asarray(labels)
    n = len(y)
    if k < 2:
        raise ValueError("k must be at least 2")
    if k > n:
        raise ValueError(f"k={k} exceeds the number of rows ({n})")
    classes, counts = np.unique(y, return_counts=True)
    if len(classes) < 2:
        raise ValueError("stratification requires at least two classes")

    warnings = []
    minority = int(counts.min())
    if k > minority:
        warnings.append(
            f"k={k} exceeds the minority count ({minority}); some folds have no minority rows")

    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    for cls in classes:
        idx = np.flatnonzero(y == cls)
        rng.shuffle(idx)
        for pos, row in enumerate(idx):
            folds[pos % k].append(int(row))
    return FoldPlan(k=k, folds=tuple(tuple(sorted(f)) for f in folds),
                    seed=seed, warnings=tuple(warnings))


def _average_ranks(v: np.ndarray) -> np.ndarray:
    """1-based ranks with ties assigned their group average."""
    order = np.argsort(v, kind="stable")
    vs = v[order]
    group_start = np.r_[True, vs[1:] != vs[:-1]]
    gid = np.cumsum(group_start) - 1
    sizes = np.bincount(gid)
    ends = np.cumsum(sizes)
    avg = ends - (sizes - 1) / 2.0  # mean of ranks end-size+1 .. end
    ranks = np.empty(len(v))
    ranks[order] = avg[gid]
    return ranks


def auroc(scores, labels) -> float:
    """Probability a random positive outranks a random negative, ties half."""
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    if s.shape != y.shape:
        raise ValueError("scores and labels must have equal length")
    n_pos = int((y == 1).sum())
    n_neg = int((y == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise UndefinedAUROCError("AUROC is undefined when only one class is present")
    ranks = _average_ranks(s)
    u = ranks[y == 1].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def confusion_matrix(scores, labels, threshold: float = 0.5) -> dict:
    """Counts at the given decision threshold; a tied score predicts positive."""
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    if s.shape != y.shape:
        raise ValueError("scores and labels must have equal length")
    pred = s >= threshold
    actual = y == 1
    return {
        "tp": int((pred & actual).sum()),
        "fp": int((pred & ~actual).sum()),
        "tn": int((~pred & ~actual).sum()),
        "fn": int((~pred & actual).sum()),
    }


def contamination_check(provenance, eval_labels, original_class_counts: dict) -> ContaminationReport:
    """Flag an evaluation set that could not have come from the original data."""
    prov = np.asarray(provenance)
    y = np.asarray(eval_labels)
    synthetic = int((prov == SYNTHETIC).sum())
    eval_counts = {0: int((y == 0).sum()), 1: int((y == 1).sum())}
    original = {0: int(original_class_counts.get(0, 0)),
                1: int(original_class_counts.get(1, 0))}
    exceeded = any(eval_counts[c] > original[c] for c in (0, 1))
    return ContaminationReport(
        synthetic_rows_in_eval=synthetic,
        eval_class_counts=eval_counts,
        original_class_counts=original,
        flagged=synthetic > 0 or exceeded,
    )


def summarize(values, population_std: bool = False) -> dict:
    """Mean and standard deviation of per-fold values.

    Sample (n-1) standard deviation by default, switchable to population;
    a single value has std 0 by convention.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise ValueError("cannot summarize an empty value list")
    mean = float(v.mean())
    if v.size == 1:
        return {"mean": mean, "std": 0.0}
    std = float(v.std(ddof=0 if population_std else 1))
    return {"mean": mean, "std": std}
