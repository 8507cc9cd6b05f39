"""
Model Selection

Stratified k-fold splitting, cross-validation and exhaustive grid search
scored by macro F-measure. Every (combination, fold) cell draws from its
own labeled child stream, so results do not depend on scheduling.
"""

import itertools
import logging
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel, Field

from ..core.contract import TrainedModel
from ..core.errors import DataError, FitError
from ..core.rng import RngStream
from ..core.schema import Dataset
from ..ingestion.smote import SmoteConfig, oversample
from ..models.registry import GRIDS, LearnerOptions, fit_model, make_hyper
from .metrics import FoldOutcome, compute_metrics, confusion

logger = logging.getLogger(__name__)

FitFn = Callable[[Dataset, Any, RngStream], TrainedModel]


@dataclass
class FoldPlan:
    """k disjoint folds of row indices covering every row once"""
    k: int
    folds: List[np.ndarray]
    stream: str = ""

    @property
    def row_count(self) -> int:
        return int(sum(f.size for f in self.folds))

    def test_rows(self, i: int) -> np.ndarray:
        return self.folds[i]

    def train_rows(self, i: int) -> np.ndarray:
        return np.sort(np.concatenate([f for j, f in enumerate(self.folds) if j != i]))

    def fold_sizes(self) -> List[int]:
        return [int(f.size) for f in self.folds]


class GridSpec(BaseModel):
    """Hyperparameter value lists; combinations vary the last parameter fastest"""
    algorithm: str
    params: Dict[str, List[Any]] = Field(default_factory=dict)

    @classmethod
    def for_algorithm(cls, algorithm: str) -> "GridSpec":
        if algorithm not in GRIDS:
            raise ValueError(f"No grid for algorithm '{algorithm}'")
        return cls(algorithm=algorithm, params={k: list(v) for k, v in GRIDS[algorithm].items()})

    @property
    def size(self) -> int:
        size = 1
        for values in self.params.values():
            size *= len(values)
        return size

    def combinations(self) -> List[Dict[str, Any]]:
        names = list(self.params)
        return [dict(zip(names, values)) for values in itertools.product(*self.params.values())]


@dataclass
class GridCell:
    index: int
    params: Dict[str, Any]
    mean_f_macro: Optional[float]
    fold_f_macro: List[float] = field(default_factory=list)
    seconds: float = 0.0
    error: Optional[str] = None


@dataclass
class GridResult:
    algorithm: str
    best_index: int
    best_params: Dict[str, Any]
    best_hyper: Any
    best_score: float
    cells: List[GridCell]
    seconds: float


def stratified_kfold(labels: Sequence[int], k: int, rng: RngStream) -> FoldPlan:
    """
    Shuffle each class, then deal rows to folds round-robin.

    The dealing position carries over from class 0 to class 1, so fold
    sizes differ by at most one overall as well as per class.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    labels = np.asarray(labels).reshape(-1)

    assignment = np.empty(labels.size, dtype=np.intp)
    position = 0
    for c in (0, 1):
        members = np.flatnonzero(labels == c)
        if members.size < k:
            raise DataError(f"Class {c} has {members.size} rows, fewer than k={k} folds")
        shuffled = members[rng.permutation(members.size)]
        assignment[shuffled] = (position + np.arange(members.size)) % k
        position += members.size

    folds = [np.flatnonzero(assignment == i) for i in range(k)]
    return FoldPlan(k=k, folds=folds, stream=rng.label)


def _fit_and_validate(
    algorithm: str,
    hyper: Any,
    data: Dataset,
    plan: FoldPlan,
    i: int,
    rng: RngStream,
    smote: Optional[SmoteConfig],
    fit: Optional[FitFn]
) -> FoldOutcome:
    stream = rng.child(f"fold-{i}")
    train = data.subset(plan.train_rows(i))
    test_rows = plan.test_rows(i)
    test = data.subset(test_rows)

    try:
        if smote is not None:
            train = oversample(train, smote, stream.child("smote"))
        started = time.perf_counter()
        if fit is None:
            model = fit_model(algorithm, train, hyper, stream)
        else:
            model = fit(train, hyper, stream)
        fit_seconds = time.perf_counter() - started
    except FitError as e:
        raise FitError(e.detail, algorithm=algorithm, fold=i) from e
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as e:
        raise FitError(str(e), algorithm=algorithm, fold=i) from e

    started = time.perf_counter()
    scores = np.asarray(model.score(test), dtype=np.float64)
    predictions = np.asarray(model.predict(test), dtype=np.int8)
    validate_seconds = time.perf_counter() - started

    return FoldOutcome(
        fold=i,
        rows=test_rows,
        labels=test.labels,
        predictions=predictions,
        scores=scores,
        confusion=confusion(predictions, test.labels),
        fit_seconds=fit_seconds,
        validate_seconds=validate_seconds,
    )


def cross_validate(
    algorithm: str,
    hyper: Any,
    data: Dataset,
    plan: FoldPlan,
    rng: RngStream,
    smote: Optional[SmoteConfig] = None,
    fit: Optional[FitFn] = None,
    n_jobs: int = 1
) -> List[FoldOutcome]:
    """
    Fit on k-1 folds and score the held-out fold, for every fold.

    With smote set, only the training part of each fold is oversampled;
    held-out rows are always original rows. fit overrides the registry
    learner (used for stub classifiers).
    """
    if plan.row_count != data.row_count:
        raise ValueError(f"Fold plan covers {plan.row_count} rows, dataset has {data.row_count}")

    if n_jobs == 1:
        outcomes = [
            _fit_and_validate(algorithm, hyper, data, plan, i, rng, smote, fit)
            for i in range(plan.k)
        ]
    else:
        outcomes = Parallel(n_jobs=n_jobs)(
            delayed(_fit_and_validate)(algorithm, hyper, data, plan, i, rng, smote, fit)
            for i in range(plan.k)
        )
    return list(outcomes)


def _score_combination(
    algorithm: str,
    index: int,
    params: Dict[str, Any],
    data: Dataset,
    plan: FoldPlan,
    rng: RngStream,
    options: LearnerOptions,
    smote: Optional[SmoteConfig]
) -> GridCell:
    started = time.perf_counter()
    try:
        hyper = make_hyper(algorithm, params, options)
        outcomes = cross_validate(algorithm, hyper, data, plan, rng.child(f"combo-{index}"), smote=smote)
    except FitError as e:
        logger.warning(f"Grid combination {index} {params} failed: {e}")
        return GridCell(index=index, params=params, mean_f_macro=None,
                        seconds=time.perf_counter() - started, error=str(e))

    fold_scores = [compute_metrics(o.confusion).f_macro for o in outcomes]
    return GridCell(
        index=index,
        params=params,
        mean_f_macro=float(np.mean(fold_scores)),
        fold_f_macro=fold_scores,
        seconds=time.perf_counter() - started,
    )


def grid_search(
    algorithm: str,
    grid: GridSpec,
    data: Dataset,
    tuning_k: int,
    rng: RngStream,
    options: Optional[LearnerOptions] = None,
    smote: Optional[SmoteConfig] = None,
    n_jobs: int = 1
) -> GridResult:
    """
    Score every combination by mean per-fold macro F over one shared
    tuning_k-fold plan and return the best. Ties go to the combination
    listed first.
    """
    combinations = grid.combinations()
    if not combinations:
        raise ValueError(f"Empty grid for {algorithm}")
    options = options or LearnerOptions()

    started = time.perf_counter()
    plan = stratified_kfold(data.labels, tuning_k, rng.child("tuning-folds"))
    logger.info(f"Grid search {algorithm}: {len(combinations)} combinations x {tuning_k} folds")

    if n_jobs == 1:
        cells = [
            _score_combination(algorithm, i, params, data, plan, rng, options, smote)
            for i, params in enumerate(combinations)
        ]
    else:
        cells = Parallel(n_jobs=n_jobs)(
            delayed(_score_combination)(algorithm, i, params, data, plan, rng, options, smote)
            for i, params in enumerate(combinations)
        )
    seconds = time.perf_counter() - started

    best: Optional[GridCell] = None
    for cell in cells:
        if cell.mean_f_macro is not None and (best is None or cell.mean_f_macro > best.mean_f_macro):
            best = cell
    if best is None:
        raise FitError(f"All {len(cells)} grid combinations failed to fit", algorithm=algorithm)

    logger.info(f"Grid search {algorithm}: best {best.params} (macro F {best.mean_f_macro:.4f}) in {seconds:.1f}s")
    return GridResult(
        algorithm=algorithm,
        best_index=best.index,
        best_params=best.params,
        best_hyper=make_hyper(algorithm, best.params, options),
        best_score=best.mean_f_macro,
        cells=list(cells),
        seconds=seconds,
    )
