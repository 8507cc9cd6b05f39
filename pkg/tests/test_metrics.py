"""
Confusion matrix, P/R/F metrics, ROC and AUC
"""

import numpy as np
import pytest
from scipy.stats import rankdata
from sklearn.metrics import accuracy_score, precision_recall_fscore_support

from stroke.core.errors import DataError
from stroke.evaluation.metrics import (
    ConfusionMatrix,
    FoldOutcome,
    RocCurve,
    auc,
    compute_metrics,
    confusion,
    pool_folds,
    roc_curve,
)


def labels_for(cm: ConfusionMatrix):
    """Prediction/label arrays realizing a confusion matrix"""
    predicted = [1] * cm.tp + [0] * cm.tn + [1] * cm.fp + [0] * cm.fn
    actual = [1] * cm.tp + [0] * cm.tn + [0] * cm.fp + [1] * cm.fn
    return np.array(predicted), np.array(actual)


def rank_auc(scores, labels):
    """Mann-Whitney statistic with midranks for ties"""
    labels = np.asarray(labels)
    ranks = rankdata(scores)
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    return (ranks[labels == 1].sum() - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg)


def brute_force_roc(scores, labels):
    """(fpr, tpr) at every distinct threshold, predicting 1 for score >= t"""
    scores = np.asarray(scores)
    labels = np.asarray(labels)
    points = {(0.0, 0.0)}
    for t in np.unique(scores):
        predicted = scores >= t
        tpr = np.sum(predicted & (labels == 1)) / np.sum(labels == 1)
        fpr = np.sum(predicted & (labels == 0)) / np.sum(labels == 0)
        points.add((float(fpr), float(tpr)))
    return sorted(points)


# ============ CONFUSION ============

def test_perfect_predictions():
    cm = confusion([1, 0, 1], [1, 0, 1])
    assert cm.fp == cm.fn == 0
    assert cm.total == 3


def test_all_majority_predictions():
    labels = np.array([1] * 548 + [0] * 28524)
    cm = confusion(np.zeros_like(labels), labels)
    assert cm.tn == 28524
    assert cm.fn == 548
    assert cm.tp == cm.fp == 0


def test_confusion_matches_pairwise_count():
    gen = np.random.default_rng(0)
    predicted = gen.integers(0, 2, 50)
    actual = gen.integers(0, 2, 50)
    cm = confusion(predicted, actual)
    counts = {"tp": 0, "tn": 0, "fp": 0, "fn": 0}
    for p, a in zip(predicted, actual):
        key = ("t" if p == a else "f") + ("p" if p == 1 else "n")
        counts[key] += 1
    assert cm.model_dump() == counts


def test_length_mismatch():
    with pytest.raises(ValueError):
        confusion([1, 0], [1])


# ============ METRICS ============

def test_hand_evaluated_metrics():
    report = compute_metrics(ConfusionMatrix(tp=40, fn=10, fp=20, tn=30))
    assert report.accuracy == pytest.approx(0.7)
    assert report.precision_stroke == pytest.approx(40 / 60)
    assert report.recall_stroke == pytest.approx(0.8)
    assert report.f_stroke == pytest.approx(0.7273, abs=1e-4)
    assert report.precision_no_stroke == pytest.approx(0.75)
    assert report.recall_no_stroke == pytest.approx(0.6)
    assert report.f_no_stroke == pytest.approx(0.6667, abs=1e-4)
    assert report.precision_macro == pytest.approx(0.7083, abs=1e-4)
    assert report.recall_macro == pytest.approx(0.7)
    assert report.f_macro == pytest.approx(0.7041, abs=1e-4)
    assert report.undefined == []


def test_macro_f_is_harmonic_mean_of_macro_p_and_r():
    report = compute_metrics(ConfusionMatrix(tp=40, fn=10, fp=20, tn=30))
    mean_of_class_f = (report.f_stroke + report.f_no_stroke) / 2
    assert report.f_macro != pytest.approx(mean_of_class_f, abs=1e-4)


def test_perfect_classifier():
    report = compute_metrics(ConfusionMatrix(tp=50, tn=50))
    assert report.accuracy == 1.0
    assert report.f_macro == 1.0
    assert report.precision_no_stroke == 1.0


def test_zero_denominator_is_flagged():
    report = compute_metrics(ConfusionMatrix(tn=30, fn=5))
    assert report.precision_stroke == 0.0
    assert "precision_stroke" in report.undefined
    assert "f_stroke" in report.undefined


def test_empty_matrix_rejected():
    with pytest.raises(DataError):
        compute_metrics(ConfusionMatrix())


@pytest.mark.parametrize("seed", range(500))
def test_metrics_match_reference(seed):
    gen = np.random.default_rng(seed)
    cm = ConfusionMatrix(**dict(zip(["tp", "tn", "fp", "fn"], gen.integers(0, 40, 4).tolist())))
    if cm.total == 0:
        cm = ConfusionMatrix(tp=1)
    predicted, actual = labels_for(cm)
    report = compute_metrics(cm)

    p, r, f, _ = precision_recall_fscore_support(actual, predicted, labels=[0, 1], zero_division=0)
    p_macro, r_macro = p.mean(), r.mean()
    f_macro = 0.0 if p_macro + r_macro == 0 else 2 * p_macro * r_macro / (p_macro + r_macro)
    assert report.accuracy == pytest.approx(accuracy_score(actual, predicted), abs=1e-12)
    assert [report.precision_no_stroke, report.precision_stroke] == pytest.approx(p.tolist(), abs=1e-12)
    assert [report.recall_no_stroke, report.recall_stroke] == pytest.approx(r.tolist(), abs=1e-12)
    assert [report.f_no_stroke, report.f_stroke] == pytest.approx(f.tolist(), abs=1e-12)
    assert report.f_macro == pytest.approx(f_macro, abs=1e-12)


def test_complementing_classes_swaps_metrics():
    report = compute_metrics(ConfusionMatrix(tp=12, tn=30, fp=7, fn=3))
    swapped = compute_metrics(ConfusionMatrix(tp=30, tn=12, fp=3, fn=7))
    assert swapped.precision_stroke == pytest.approx(report.precision_no_stroke)
    assert swapped.recall_no_stroke == pytest.approx(report.recall_stroke)
    assert swapped.f_macro == pytest.approx(report.f_macro)


# ============ ROC / AUC ============

def test_perfect_ranking():
    curve = roc_curve([0.9, 0.8, 0.3, 0.1], [1, 1, 0, 0])
    assert (0.0, 1.0) in curve.points()
    assert auc(curve) == 1.0


def test_tied_scores_give_diagonal():
    curve = roc_curve([0.5] * 6, [1, 0, 1, 0, 0, 1])
    assert curve.points() == [(0.0, 0.0), (1.0, 1.0)]
    assert auc(curve) == 0.5


def test_single_class_rejected():
    with pytest.raises(DataError):
        roc_curve([0.1, 0.2], [1, 1])


def test_auc_needs_two_points():
    with pytest.raises(ValueError):
        auc(RocCurve(fpr=np.array([0.0]), tpr=np.array([0.0]), thresholds=np.array([np.inf])))


def test_twelve_point_fixture():
    scores = [0.9, 0.8, 0.8, 0.7, 0.6, 0.55, 0.5, 0.5, 0.4, 0.3, 0.2, 0.1]
    labels = [1, 1, 0, 1, 0, 1, 0, 1, 0, 0, 1, 0]
    curve = roc_curve(scores, labels)
    assert curve.points() == brute_force_roc(scores, labels)
    assert auc(curve) == pytest.approx(rank_auc(scores, labels), abs=1e-12)


@pytest.mark.parametrize("seed", range(200))
def test_roc_and_auc_match_oracles(seed):
    gen = np.random.default_rng(seed)
    n = int(gen.integers(4, 60))
    labels = gen.integers(0, 2, n)
    labels[:2] = [0, 1]
    scores = np.round(gen.normal(size=n), 1)
    curve = roc_curve(scores, labels)

    assert curve.points() == pytest.approx(brute_force_roc(scores, labels), abs=1e-12)
    assert auc(curve) == pytest.approx(rank_auc(scores, labels), abs=1e-9)
    assert (np.diff(curve.fpr) >= 0).all() and (np.diff(curve.tpr) >= 0).all()
    assert curve.points()[-1] == (1.0, 1.0)


def test_roc_invariant_under_monotone_transform():
    gen = np.random.default_rng(5)
    scores = gen.normal(size=40)
    labels = gen.integers(0, 2, 40)
    labels[:2] = [0, 1]
    assert roc_curve(scores, labels).points() == roc_curve(np.exp(3 * scores) + 7, labels).points()


# ============ POOLING ============

def outcome(fold, rows, labels, scores):
    labels = np.asarray(labels)
    scores = np.asarray(scores, dtype=float)
    predictions = (scores >= 0.5).astype(np.int8)
    return FoldOutcome(
        fold=fold, rows=np.asarray(rows), labels=labels, predictions=predictions, scores=scores,
        confusion=confusion(predictions, labels), fit_seconds=1.0, validate_seconds=0.5,
    )


def test_single_fold_pooling_is_identity():
    fold = outcome(0, [0, 1, 2, 3], [1, 0, 1, 0], [0.9, 0.2, 0.4, 0.6])
    pooled = pool_folds([fold])
    assert pooled.confusion == fold.confusion
    assert pooled.report.f_macro == compute_metrics(fold.confusion).f_macro


def test_pooling_sums_and_concatenates():
    a = outcome(0, [0, 2, 4], [1, 0, 1], [0.9, 0.2, 0.4])
    b = outcome(1, [1, 3, 5], [0, 1, 0], [0.7, 0.8, 0.1])
    pooled = pool_folds([a, b])
    assert pooled.confusion == a.confusion + b.confusion
    assert pooled.report.timings == {"fit": 2.0, "validate": 1.0}
    assert pooled.oof_scores.tolist() == [0.9, 0.7, 0.2, 0.8, 0.4, 0.1]

    direct = auc(roc_curve([0.9, 0.2, 0.4, 0.7, 0.8, 0.1], [1, 0, 1, 0, 1, 0]))
    assert pooled.report.auc == pytest.approx(direct)
    assert len(pooled.fold_reports) == 2
