"""Metrics, cross-validation and grid search"""

from .metrics import (
    ConfusionMatrix,
    FoldOutcome,
    MetricsReport,
    PooledResult,
    RocCurve,
    auc,
    compute_metrics,
    confusion,
    pool_folds,
    roc_curve,
)
from .selection import FoldPlan, GridResult, GridSpec, cross_validate, grid_search, stratified_kfold

__all__ = [
    "ConfusionMatrix",
    "MetricsReport",
    "RocCurve",
    "FoldOutcome",
    "PooledResult",
    "confusion",
    "compute_metrics",
    "roc_curve",
    "auc",
    "pool_folds",
    "FoldPlan",
    "GridSpec",
    "GridResult",
    "stratified_kfold",
    "cross_validate",
    "grid_search",
]
