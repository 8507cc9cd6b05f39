"""
Experiment Runner

Runs the full protocol:
1. read, validate, clean and encode the stroke CSV
2. per regime (unbalanced, balanced), per algorithm:
   grid search -> eval_k-fold cross-validation with the tuned
   hyperparameters -> pooled metrics and ROC -> optional final refit
3. assemble one ExperimentReport

A failing algorithm is recorded in the report and the run carries on.
"""

import json
import logging
import platform
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from .. import __version__
from ..config import BalanceMode, ExperimentSettings
from ..core.errors import ConfigError, StrokeError
from ..core.rng import derive_stream
from ..core.schema import Dataset
from ..evaluation.metrics import pool_folds
from ..evaluation.selection import GridSpec, cross_validate, grid_search, stratified_kfold
from ..ingestion.csv_reader import ID_COLUMN, missing_profile, missing_token_set, read_csv, validate_schema
from ..ingestion.preprocess import (
    EncodingMap,
    drop_columns,
    drop_missing_rows,
    label_encode,
    min_max_normalize,
    pearson_correlation,
    write_dataset,
)
from ..ingestion.smote import SmoteConfig, class_balance, oversample
from ..models.registry import GRIDS, fit_model
from .schema import (
    AlgorithmResult,
    ExperimentReport,
    FoldReport,
    PreprocessingReport,
    RegimeResult,
    TuningCell,
    TuningReport,
)

logger = logging.getLogger(__name__)

# The reference LR grid spans five solvers; three are implemented here
REFERENCE_LR_GRID_SIZE = 35


@dataclass
class PreparedData:
    dataset: Dataset
    encoding: EncodingMap
    report: PreprocessingReport


def stratified_sample(data: Dataset, frac: float, seed: int) -> Dataset:
    """Keep round(frac * count) rows of each class, original order preserved"""
    if frac >= 1.0:
        return data
    stream = derive_stream(seed, "sample")
    keep: List[np.ndarray] = []
    for c in (0, 1):
        members = np.flatnonzero(data.labels == c)
        size = int(round(frac * members.size))
        keep.append(members[stream.permutation(members.size)[:size]])
    rows = np.sort(np.concatenate(keep))
    logger.info(f"Stratified sample ({frac:.0%}): {rows.size} of {data.row_count} rows")
    return data.subset(rows)


def prepare(settings: ExperimentSettings) -> PreparedData:
    """Read -> validate -> profile -> drop id and missing rows -> encode"""
    if settings.data_path is None:
        raise ConfigError("No dataset path configured (--data or STROKE_DATA_PATH)")

    tokens = missing_token_set(settings.missing_tokens, settings.unknown_is_missing)
    table = read_csv(settings.data_path, tokens).renamed(settings.column_map)
    schema = validate_schema(table)
    profile = missing_profile(table)
    logger.info(
        f"Missing cells: {profile.total} in {profile.rows_with_missing} rows; "
        + ", ".join(f"{k}={v}" for k, v in profile.counts.items() if v)
    )

    dropped = [ID_COLUMN] + list(schema.unexpected)
    cleaned = drop_missing_rows(drop_columns(table, dropped))
    data, encoding = label_encode(cleaned, schema.kinds)

    normalization = None
    if settings.normalize:
        data, params = min_max_normalize(data)
        normalization = {name: list(bounds) for name, bounds in params.ranges.items()}

    counts = data.class_counts()
    report = PreprocessingReport(
        source=str(settings.data_path),
        input_rows=table.row_count,
        missing=profile.to_dict(),
        rows_after_drop=data.row_count,
        dropped_columns=dropped,
        class_counts={"stroke": counts[1], "no_stroke": counts[0]},
        categories=encoding.categories,
        correlation=pearson_correlation(data),
        normalization=normalization,
    )
    logger.info(f"Preprocessed: {data.row_count} rows ({counts[1]} stroke, {counts[0]} no stroke)")
    return PreparedData(dataset=data, encoding=encoding, report=report)


def write_preprocessed(prepared: PreparedData, out_dir) -> Dict[str, Path]:
    """Encoded dataset CSV plus encoding map, correlation and missing profile JSON"""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "dataset": write_dataset(prepared.dataset, out_dir / "encoded.csv"),
        "encoding": out_dir / "encoding.json",
        "preprocessing": out_dir / "preprocessing.json",
    }
    paths["encoding"].write_text(prepared.encoding.model_dump_json(indent=2))
    paths["preprocessing"].write_text(prepared.report.model_dump_json(indent=2))
    return paths


def _regime_data(
    regime: str,
    data: Dataset,
    settings: ExperimentSettings,
    smote: SmoteConfig
) -> Tuple[Dataset, Optional[SmoteConfig]]:
    """Dataset to evaluate on, plus the SMOTE config to apply inside folds (per-fold mode)"""
    if regime == "unbalanced":
        return data, None
    if settings.balance == BalanceMode.PER_FOLD:
        return data, smote
    return oversample(data, smote, derive_stream(settings.seed, "smote")), None


def _per_fold_balance(regime: str, data: Dataset, settings: ExperimentSettings) -> Dict[str, float]:
    """Mean class balance of the evaluation training folds once SMOTE has filled the minority"""
    plan = stratified_kfold(data.labels, settings.eval_k, derive_stream(settings.seed, f"{regime}/eval-folds"))
    # each oversampled training fold holds its majority count of both classes
    per_class = sum(int(np.bincount(data.labels[plan.train_rows(i)], minlength=2).max()) for i in range(plan.k))
    return {
        "rows": 2 * per_class / plan.k,
        "stroke": per_class / plan.k,
        "no_stroke": per_class / plan.k,
        "stroke_percent": 50.0,
        "no_stroke_percent": 50.0,
        "folds": plan.k,
    }


def _convergence_notes(model) -> List[str]:
    converged = getattr(model, "converged", True)
    if converged:
        return []
    return [f"final {model.algorithm} fit stopped at {model.iterations} iterations without converging"]


def run_algorithm(
    algorithm: str,
    regime: str,
    data: Dataset,
    settings: ExperimentSettings,
    fold_smote: Optional[SmoteConfig],
    out_dir: Optional[Path]
) -> AlgorithmResult:
    """Tune, evaluate and (optionally) refit one algorithm on one regime"""
    options = settings.learner_options()
    result = AlgorithmResult(algorithm=algorithm)

    grid = GridSpec.for_algorithm(algorithm)
    tuned = grid_search(
        algorithm,
        grid,
        data,
        settings.tuning_k,
        derive_stream(settings.seed, f"{regime}/{algorithm}/tuning"),
        options=options,
        smote=fold_smote,
        n_jobs=settings.n_jobs,
    )
    result.tuning = TuningReport(
        grid_size=grid.size,
        tuning_k=settings.tuning_k,
        best_index=tuned.best_index,
        best_params=tuned.best_params,
        best_score=tuned.best_score,
        cells=[
            TuningCell(
                params=cell.params,
                mean_f_macro=cell.mean_f_macro,
                fold_f_macro=cell.fold_f_macro,
                error=cell.error,
                seconds=cell.seconds,
            )
            for cell in tuned.cells
        ],
        seconds=tuned.seconds,
    )
    result.hyper = tuned.best_hyper.model_dump(mode="json")

    plan = stratified_kfold(data.labels, settings.eval_k, derive_stream(settings.seed, f"{regime}/eval-folds"))
    outcomes = cross_validate(
        algorithm,
        tuned.best_hyper,
        data,
        plan,
        derive_stream(settings.seed, f"{regime}/{algorithm}/eval"),
        smote=fold_smote,
        n_jobs=settings.n_jobs,
    )
    pooled = pool_folds(outcomes, data.row_count)
    result.confusion = pooled.confusion
    result.pooled = pooled.report
    result.folds = [
        FoldReport(fold=o.fold, rows=int(o.rows.size), confusion=o.confusion, metrics=m)
        for o, m in zip(outcomes, pooled.fold_reports)
    ]
    result.timings = {
        "tuning": tuned.seconds,
        "fit": pooled.report.timings["fit"],
        "validate": pooled.report.timings["validate"],
    }
    pooled.report.timings = dict(result.timings)

    if settings.save_models:
        train = data
        if fold_smote is not None:
            train = oversample(data, fold_smote, derive_stream(settings.seed, f"{regime}/{algorithm}/final-smote"))
        started = time.perf_counter()
        model = fit_model(algorithm, train, tuned.best_hyper, derive_stream(settings.seed, f"{regime}/{algorithm}/final"))
        result.timings["final_fit"] = time.perf_counter() - started
        result.notes.extend(_convergence_notes(model))
        if out_dir is not None:
            path = out_dir / "models" / regime / f"{algorithm}.json"
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(model.to_dict()))
            result.model_path = str(path)

    logger.info(
        f"[{regime}] {algorithm}: accuracy {result.pooled.accuracy:.4f}, "
        f"stroke recall {result.pooled.recall_stroke:.4f}, AUC {result.pooled.auc}"
    )
    return result


def _metadata(settings: ExperimentSettings) -> Dict[str, object]:
    return {
        "roc_aggregation": "pooled out-of-fold scores",
        "reg_convention": settings.reg_convention.value,
        "balance_mode": settings.balance.value,
        "sample_frac": settings.sample_frac,
        "grid_sizes": {a: GridSpec.for_algorithm(a).size for a in settings.algorithms},
        "deviations": [
            f"lr grid uses solvers {GRIDS['lr']['solver']}: "
            f"{GridSpec.for_algorithm('lr').size} combinations instead of {REFERENCE_LR_GRID_SIZE}",
            "naive bayes uses Gaussian likelihoods for every feature",
        ],
    }


def _environment() -> Dict[str, str]:
    return {
        "stroke": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "platform": platform.platform(),
    }


def run_experiment(settings: ExperimentSettings, out_dir: Optional[Path] = None) -> ExperimentReport:
    """Run every configured regime x algorithm cell and return the report"""
    out_dir = Path(out_dir) if out_dir is not None else None
    prepared = prepare(settings)
    data = stratified_sample(prepared.dataset, settings.sample_frac, settings.seed)
    if settings.sample_frac < 1.0:
        prepared.report.sampled_rows = data.row_count

    report = ExperimentReport(
        environment=_environment(),
        config=settings.echo(),
        metadata=_metadata(settings),
        preprocessing=prepared.report,
    )
    smote = SmoteConfig(k_neighbors=settings.smote_k, round_categorical=settings.smote_round_categorical)

    for regime in settings.active_regimes:
        regime_data, fold_smote = _regime_data(regime, data, settings, smote)
        regime_result = RegimeResult(
            regime=regime,
            rows=regime_data.row_count,
            balance=(
                _per_fold_balance(regime, regime_data, settings) if fold_smote is not None
                else class_balance(regime_data)
            ),
        )
        for algorithm in settings.algorithms:
            try:
                result = run_algorithm(algorithm, regime, regime_data, settings, fold_smote, out_dir)
            except (StrokeError, ValueError, ArithmeticError, np.linalg.LinAlgError) as e:
                logger.error(f"[{regime}] {algorithm} failed: {e}")
                result = AlgorithmResult(algorithm=algorithm, status="failed", error=str(e))
            regime_result.algorithms.append(result)
        report.regimes.append(regime_result)

    if report.failed:
        logger.warning(f"Failed cells: {report.failed}")
    return report


def write_report(report: ExperimentReport, out_dir) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "report.json"
    path.write_text(report.model_dump_json(indent=2))
    logger.info(f"Report written to {path}")
    return path


def load_report(path) -> ExperimentReport:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Report not found: {path}")
    return ExperimentReport.model_validate_json(path.read_text())
