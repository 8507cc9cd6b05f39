"""End-to-end experiment: runner, report documents and figure tables"""

from .figures import FIGURES, figure_tables, write_figures
from .runner import load_report, prepare, run_experiment, stratified_sample, write_preprocessed, write_report
from .schema import SCHEMA_VERSION, AlgorithmResult, ExperimentReport, RegimeResult, normalized

__all__ = [
    "FIGURES",
    "figure_tables",
    "write_figures",
    "prepare",
    "run_experiment",
    "stratified_sample",
    "write_preprocessed",
    "write_report",
    "load_report",
    "SCHEMA_VERSION",
    "AlgorithmResult",
    "RegimeResult",
    "ExperimentReport",
    "normalized",
]
