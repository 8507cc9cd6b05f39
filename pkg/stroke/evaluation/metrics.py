"""
Classification Metrics

Confusion matrices, class-specific and macro-averaged precision / recall
/ F-measure, ROC curves and AUC. Stroke (1) is the positive class.

Macro F is the harmonic mean of macro precision and macro recall, not
the mean of the two class F-measures. Any ratio with a zero denominator
is reported as 0 and its name is listed in MetricsReport.undefined.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field
from scipy.integrate import trapezoid

from ..core.errors import DataError

logger = logging.getLogger(__name__)


class ConfusionMatrix(BaseModel):
    tp: int = Field(default=0, ge=0)
    tn: int = Field(default=0, ge=0)
    fp: int = Field(default=0, ge=0)
    fn: int = Field(default=0, ge=0)

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(
            tp=self.tp + other.tp,
            tn=self.tn + other.tn,
            fp=self.fp + other.fp,
            fn=self.fn + other.fn,
        )

    def as_grid(self) -> List[List[int]]:
        """Rows = actual (no stroke, stroke), columns = predicted"""
        return [[self.tn, self.fp], [self.fn, self.tp]]


class MetricsReport(BaseModel):
    """Scalar metrics for one confusion matrix, plus optional ROC data and timings"""
    accuracy: float
    precision_stroke: float
    precision_no_stroke: float
    precision_macro: float
    recall_stroke: float
    recall_no_stroke: float
    recall_macro: float
    f_stroke: float
    f_no_stroke: float
    f_macro: float
    undefined: List[str] = Field(default_factory=list)
    auc: Optional[float] = None
    roc: Optional[List[Tuple[float, float]]] = None
    timings: Dict[str, float] = Field(default_factory=dict)


@dataclass(frozen=True)
class RocCurve:
    """Points ordered by decreasing threshold, from (0, 0) to (1, 1)"""
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray   # inf for the (0, 0) point

    def points(self) -> List[Tuple[float, float]]:
        return [(float(f), float(t)) for f, t in zip(self.fpr, self.tpr)]


@dataclass
class FoldOutcome:
    """Held-out result of one cross-validation fold"""
    fold: int
    rows: np.ndarray
    labels: np.ndarray
    predictions: np.ndarray
    scores: np.ndarray
    confusion: ConfusionMatrix
    fit_seconds: float = 0.0
    validate_seconds: float = 0.0


@dataclass
class PooledResult:
    confusion: ConfusionMatrix
    report: MetricsReport
    curve: Optional[RocCurve]
    oof_scores: np.ndarray     # indexed by dataset row
    oof_predictions: np.ndarray
    fold_reports: List[MetricsReport] = field(default_factory=list)


def confusion(predictions: Sequence[int], labels: Sequence[int]) -> ConfusionMatrix:
    predicted = np.asarray(predictions).reshape(-1)
    actual = np.asarray(labels).reshape(-1)
    if predicted.shape != actual.shape:
        raise ValueError(f"Length mismatch: {predicted.size} predictions for {actual.size} labels")
    predicted = predicted == 1
    actual = actual == 1
    return ConfusionMatrix(
        tp=int(np.count_nonzero(predicted & actual)),
        tn=int(np.count_nonzero(~predicted & ~actual)),
        fp=int(np.count_nonzero(predicted & ~actual)),
        fn=int(np.count_nonzero(~predicted & actual)),
    )


def _ratio(numerator: float, denominator: float, name: str, undefined: List[str]) -> float:
    if denominator == 0:
        undefined.append(name)
        return 0.0
    return numerator / denominator


def _harmonic(p: float, r: float, name: str, undefined: List[str]) -> float:
    return _ratio(2.0 * p * r, p + r, name, undefined)


def compute_metrics(cm: ConfusionMatrix) -> MetricsReport:
    """Accuracy, per-class and macro P/R/F from one confusion matrix"""
    if cm.total == 0:
        raise DataError("Cannot compute metrics from an empty confusion matrix")

    undefined: List[str] = []
    p_stroke = _ratio(cm.tp, cm.tp + cm.fp, "precision_stroke", undefined)
    p_no = _ratio(cm.tn, cm.tn + cm.fn, "precision_no_stroke", undefined)
    r_stroke = _ratio(cm.tp, cm.tp + cm.fn, "recall_stroke", undefined)
    r_no = _ratio(cm.tn, cm.tn + cm.fp, "recall_no_stroke", undefined)
    p_macro = (p_stroke + p_no) / 2.0
    r_macro = (r_stroke + r_no) / 2.0

    return MetricsReport(
        accuracy=(cm.tp + cm.tn) / cm.total,
        precision_stroke=p_stroke,
        precision_no_stroke=p_no,
        precision_macro=p_macro,
        recall_stroke=r_stroke,
        recall_no_stroke=r_no,
        recall_macro=r_macro,
        f_stroke=_harmonic(p_stroke, r_stroke, "f_stroke", undefined),
        f_no_stroke=_harmonic(p_no, r_no, "f_no_stroke", undefined),
        f_macro=_harmonic(p_macro, r_macro, "f_macro", undefined),
        undefined=undefined,
    )


def roc_curve(scores: Sequence[float], labels: Sequence[int]) -> RocCurve:
    """
    Sweep thresholds over distinct scores, highest first.

    Tied scores produce a single point, so the curve is a step/diagonal
    segment through each tie group.
    """
    scores = np.asarray(scores, dtype=np.float64).reshape(-1)
    labels = np.asarray(labels).reshape(-1) == 1
    if scores.shape != labels.shape:
        raise ValueError(f"Length mismatch: {scores.size} scores for {labels.size} labels")
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError("ROC curve needs both classes among the labels")

    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_labels = labels[order]

    # Last index of every tie group
    ends = np.flatnonzero(np.diff(sorted_scores) != 0)
    ends = np.append(ends, sorted_scores.size - 1)

    tps = np.cumsum(sorted_labels)[ends]
    fps = (ends + 1) - tps
    return RocCurve(
        fpr=np.concatenate([[0.0], fps / n_neg]),
        tpr=np.concatenate([[0.0], tps / n_pos]),
        thresholds=np.concatenate([[np.inf], sorted_scores[ends]]),
    )


def auc(curve: RocCurve) -> float:
    """Trapezoidal area under the curve"""
    if curve.fpr.size < 2:
        raise ValueError(f"AUC needs at least 2 ROC points, got {curve.fpr.size}")
    return float(trapezoid(curve.tpr, curve.fpr))


def pool_folds(folds: Sequence[FoldOutcome], n_rows: Optional[int] = None) -> PooledResult:
    """
    Sum fold confusion matrices and compute one ROC over the concatenated
    out-of-fold scores. Per-fold reports are kept alongside.
    """
    if not folds:
        raise ValueError("pool_folds needs at least one fold")

    total = ConfusionMatrix()
    for outcome in folds:
        total = total + outcome.confusion

    rows = np.concatenate([f.rows for f in folds])
    n_rows = int(rows.max()) + 1 if n_rows is None else n_rows
    oof_scores = np.full(n_rows, np.nan)
    oof_predictions = np.full(n_rows, -1, dtype=np.int8)
    oof_labels = np.full(n_rows, -1, dtype=np.int8)
    for outcome in folds:
        oof_scores[outcome.rows] = outcome.scores
        oof_predictions[outcome.rows] = outcome.predictions
        oof_labels[outcome.rows] = outcome.labels

    report = compute_metrics(total)
    covered = oof_labels >= 0
    curve: Optional[RocCurve] = None
    labels = oof_labels[covered]
    if labels.min() != labels.max():
        curve = roc_curve(oof_scores[covered], labels)
        report.roc = curve.points()
        report.auc = auc(curve)
    else:
        logger.warning("Pooled folds hold a single class; ROC/AUC skipped")

    report.timings = {
        "fit": float(sum(f.fit_seconds for f in folds)),
        "validate": float(sum(f.validate_seconds for f in folds)),
    }
    fold_reports = [compute_metrics(f.confusion) for f in folds]
    return PooledResult(
        confusion=total,
        report=report,
        curve=curve,
        oof_scores=oof_scores,
        oof_predictions=oof_predictions,
        fold_reports=fold_reports,
    )
