"""
Stroke Prediction Experiment CLI

Usage:
    python -m stroke preprocess --data healthcare-dataset.csv --out results
    python -m stroke run --data healthcare-dataset.csv --algorithms nb,lr --sample-frac 0.2
    python -m stroke report --report results/report.json --figure fig9

Exit codes: 0 success, 1 experiment failure, 2 usage or configuration error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from .config import ExperimentSettings, load_settings
from .core.errors import ConfigError, StrokeError
from .experiment.figures import FIGURES, write_figures
from .experiment.runner import load_report, prepare, run_experiment, write_preprocessed, write_report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _csv_list(value: str) -> List[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stroke",
        description="Stroke prediction: preprocessing, SMOTE, five classifiers, grid search and 10-fold evaluation",
        formatter_class=argparse.RawDescriptionHelpFormatter
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    commands = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="Flat TOML file with setting overrides")
    common.add_argument("--data", type=Path, dest="data_path", help="Cerebral stroke CSV")
    common.add_argument("--seed", type=int, help="Master random seed (default 42)")
    common.add_argument("--out", type=Path, dest="out_dir", help="Output directory (default results/)")
    common.add_argument("--normalize", action="store_true", default=None,
                        help="Min-max normalize continuous columns")
    common.add_argument("--unknown-is-missing", action="store_true", default=None,
                        help="Treat smoking_status 'Unknown' as missing")

    commands.add_parser("preprocess", parents=[common], help="Clean and encode the dataset")

    run = commands.add_parser("run", parents=[common], help="Tune and evaluate the classifiers")
    run.add_argument("--balance", choices=["none", "whole", "per-fold"],
                     help="SMOTE mode for the balanced regime (default whole)")
    run.add_argument("--algorithms", type=_csv_list, help="Comma-separated subset of dt,rf,svm,nb,lr")
    run.add_argument("--regimes", type=_csv_list, help="Comma-separated subset of unbalanced,balanced")
    run.add_argument("--tuning-k", type=int, help="Folds inside grid search (default 3)")
    run.add_argument("--eval-k", type=int, help="Folds for evaluation (default 10)")
    run.add_argument("--sample-frac", type=float, help="Stratified subsample fraction (default 1.0)")
    run.add_argument("--reg-convention", choices=["lambda", "inverse"],
                     help="How the LR grid value maps to the penalty weight")
    run.add_argument("--n-jobs", type=int, help="Parallel grid workers (default 1)")
    run.add_argument("--no-save-models", action="store_false", dest="save_models", default=None,
                     help="Skip the final refit and model files")

    report = commands.add_parser("report", help="Emit figure tables from a saved report")
    report.add_argument("--report", type=Path, default=Path("results/report.json"), help="Report JSON")
    report.add_argument("--figure", default="all", help=f"Figure id: {', '.join(list(FIGURES) + ['all'])}")
    report.add_argument("--out", type=Path, dest="out_dir", help="Output directory (default next to the report)")
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    skip = {"command", "verbose", "config", "report", "figure"}
    return {key: value for key, value in vars(args).items() if key not in skip and value is not None}


def cmd_preprocess(settings: ExperimentSettings) -> int:
    prepared = prepare(settings)
    paths = write_preprocessed(prepared, settings.out_dir / "preprocessed")
    logger.info(
        f"Preprocessed {prepared.report.rows_after_drop} rows "
        f"({prepared.report.class_counts['stroke']} stroke) -> {paths['dataset']}"
    )
    return EXIT_OK


def cmd_run(settings: ExperimentSettings) -> int:
    report = run_experiment(settings, settings.out_dir)
    write_report(report, settings.out_dir)
    write_figures(report, "all", settings.out_dir / "figures")
    if report.failed:
        logger.error(f"{len(report.failed)} cell(s) failed: {', '.join(report.failed)}")
        return EXIT_FAILURE
    return EXIT_OK


def cmd_report(report_path: Path, figure: str, out_dir: Optional[Path]) -> int:
    report = load_report(report_path)
    out_dir = out_dir if out_dir is not None else report_path.parent / "figures"
    write_figures(report, figure, out_dir)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s - STROKE - %(levelname)s - %(message)s"
    )

    try:
        if args.command == "report":
            return cmd_report(args.report, args.figure, args.out_dir)

        settings = load_settings(args.config, _overrides(args))
        if settings.data_path is not None and not settings.data_path.is_file():
            raise FileNotFoundError(f"Dataset file not found: {settings.data_path}")
        if args.command == "preprocess":
            return cmd_preprocess(settings)
        return cmd_run(settings)
    except (ConfigError, FileNotFoundError) as e:
        logger.error(str(e))
        return EXIT_USAGE
    except StrokeError as e:
        logger.error(str(e))
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
