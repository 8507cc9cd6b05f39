"""
Figure tables.

Each figure id projects the stored ExperimentReport into one or more
plot-ready pandas tables:

    fig3  correlation of each feature with stroke, descending
    fig4  missing values per column
    fig5  class balance per regime
    fig6  accuracy by algorithm and regime
    fig7  pooled confusion matrices
    fig8  class-specific and macro precision / recall / F-measure
    fig9  ROC points per algorithm and regime, plus an AUC table
    fig10 tuning time and model building + validation time
"""

import logging
from pathlib import Path
from typing import Callable, Dict, List

import pandas as pd

from ..core.errors import ConfigError
from ..models.registry import DISPLAY_NAMES
from .schema import ExperimentReport

logger = logging.getLogger(__name__)

Tables = Dict[str, pd.DataFrame]


def _ok_results(report: ExperimentReport):
    for regime in report.regimes:
        for result in regime.algorithms:
            if result.status == "ok" and result.pooled is not None:
                yield regime.regime, result


def fig3(report: ExperimentReport) -> Tables:
    rows = sorted(report.preprocessing.correlation.items(), key=lambda item: item[1], reverse=True)
    return {"fig3_correlation": pd.DataFrame(rows, columns=["feature", "pearson_r"])}


def fig4(report: ExperimentReport) -> Tables:
    missing = report.preprocessing.missing
    frame = pd.DataFrame({
        "column": list(missing["counts"]),
        "missing": list(missing["counts"].values()),
        "percent": [missing["percent"][c] for c in missing["counts"]],
    })
    return {"fig4_missing": frame}


def fig5(report: ExperimentReport) -> Tables:
    rows = [{"regime": r.regime, **r.balance} for r in report.regimes]
    return {"fig5_balance": pd.DataFrame(rows)}


def fig6(report: ExperimentReport) -> Tables:
    rows = [
        {"regime": regime, "algorithm": result.algorithm, "name": DISPLAY_NAMES[result.algorithm],
         "accuracy": result.pooled.accuracy}
        for regime, result in _ok_results(report)
    ]
    return {"fig6_accuracy": pd.DataFrame(rows, columns=["regime", "algorithm", "name", "accuracy"])}


def fig7(report: ExperimentReport) -> Tables:
    rows = [
        {"regime": regime, "algorithm": result.algorithm, **result.confusion.model_dump()}
        for regime, result in _ok_results(report)
    ]
    return {"fig7_confusion": pd.DataFrame(rows, columns=["regime", "algorithm", "tp", "tn", "fp", "fn"])}


def fig8(report: ExperimentReport) -> Tables:
    columns = [
        "precision_stroke", "precision_no_stroke", "precision_macro",
        "recall_stroke", "recall_no_stroke", "recall_macro",
        "f_stroke", "f_no_stroke", "f_macro",
    ]
    rows = [
        {"regime": regime, "algorithm": result.algorithm, **{c: getattr(result.pooled, c) for c in columns}}
        for regime, result in _ok_results(report)
    ]
    return {"fig8_prf": pd.DataFrame(rows, columns=["regime", "algorithm"] + columns)}


def fig9(report: ExperimentReport) -> Tables:
    tables: Tables = {}
    auc_rows = []
    for regime, result in _ok_results(report):
        if result.pooled.roc is None:
            continue
        tables[f"fig9_roc_{regime}_{result.algorithm}"] = pd.DataFrame(result.pooled.roc, columns=["fpr", "tpr"])
        auc_rows.append({"regime": regime, "algorithm": result.algorithm, "auc": result.pooled.auc})
    tables["fig9_auc"] = pd.DataFrame(auc_rows, columns=["regime", "algorithm", "auc"])
    return tables


def fig10(report: ExperimentReport) -> Tables:
    rows = []
    for regime, result in _ok_results(report):
        timings = result.timings
        rows.append({
            "regime": regime,
            "algorithm": result.algorithm,
            "tuning_seconds": timings.get("tuning", 0.0),
            "build_validate_seconds": timings.get("fit", 0.0) + timings.get("validate", 0.0),
        })
    return {"fig10_timing": pd.DataFrame(rows, columns=["regime", "algorithm", "tuning_seconds", "build_validate_seconds"])}


FIGURES: Dict[str, Callable[[ExperimentReport], Tables]] = {
    "fig3": fig3,
    "fig4": fig4,
    "fig5": fig5,
    "fig6": fig6,
    "fig7": fig7,
    "fig8": fig8,
    "fig9": fig9,
    "fig10": fig10,
}


def figure_tables(report: ExperimentReport, figure: str) -> Tables:
    """Tables for one figure id, or for every figure with 'all'"""
    if figure == "all":
        tables: Tables = {}
        for build in FIGURES.values():
            tables.update(build(report))
        return tables
    if figure not in FIGURES:
        raise ConfigError(f"Unknown figure id '{figure}'. Valid ids: {', '.join(list(FIGURES) + ['all'])}")
    return FIGURES[figure](report)


def write_figures(report: ExperimentReport, figure: str, out_dir) -> List[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, frame in figure_tables(report, figure).items():
        path = out_dir / f"{name}.csv"
        frame.to_csv(path, index=False)
        paths.append(path)
    logger.info(f"Wrote {len(paths)} table(s) for {figure} to {out_dir}")
    return paths
