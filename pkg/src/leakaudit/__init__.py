"""Desk-scale audit of data leakage from oversampling and imputation placed
before the train/test partition in imbalanced clinical classification."""

from .cohort_etl import (CohortConfig, CohortTable, RawTables, build_dataset,
                         extract_cohort, label_los, load_tables)
from .evaluation import (ContaminationReport, FoldPlan, FoldResult,
                         UndefinedAUROCError, auroc, confusion_matrix,
                         contamination_check, stratified_kfold, summarize)
from .experiment import (ExperimentReport, RunConfig, SETUP_AFTER, SETUP_BEFORE,
                         SETUP_LEAKY_HOLDOUT, SETUP_NO_OVERSAMPLING, render_report,
                         run_experiment, run_leaky_holdout, run_setup)
from .forest import ForestConfig, ForestModel, majority_baseline, predict_proba, train_forest
from .resampling import AdasynConfig, adasyn, allocate_counts
from .synth import SynthConfig, generate_cohort
from .tabular import (BINARY, Column, Dataset, ImputerModel, NUMERIC, ORIGINAL,
                      SYNTHETIC, apply_imputer, fit_imputer, read_dataset,
                      write_dataset)

__version__ = "0.1.0"

__all__ = [
    "AdasynConfig", "BINARY", "CohortConfig", "CohortTable", "Column",
    "ContaminationReport", "Dataset", "ExperimentReport", "FoldPlan",
    "FoldResult", "ForestConfig", "ForestModel", "ImputerModel", "NUMERIC",
    "ORIGINAL", "RawTables", "RunConfig", "SETUP_AFTER", "SETUP_BEFORE",
    "SETUP_LEAKY_HOLDOUT", "SETUP_NO_OVERSAMPLING", "SYNTHETIC", "SynthConfig",
    "UndefinedAUROCError", "adasyn", "allocate_counts", "apply_imputer",
    "auroc", "build_dataset", "confusion_matrix", "contamination_check",
    "extract_cohort", "fit_imputer", "generate_cohort", "label_los",
    "load_tables", "majority_baseline", "predict_proba", "read_dataset",
    "render_report", "run_experiment", "run_leaky_holdout", "run_setup",
    "stratified_kfold", "summarize", "train_forest", "write_dataset",
]
