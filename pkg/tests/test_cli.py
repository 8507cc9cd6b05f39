"""
Command-line surface: preprocess, run and report
"""

import json

import pandas as pd
import pytest

from conftest import FIXTURES
from stroke.cli import EXIT_OK, EXIT_USAGE, build_parser, main
from stroke.experiment.runner import load_report
from stroke.experiment.schema import normalized

FAST = ["--algorithms", "dt,nb,lr,svm", "--tuning-k", "2", "--eval-k", "2"]


@pytest.fixture(scope="module")
def ran(tmp_path_factory):
    """One small run over the fixture, shared by the module; returns its output directory"""
    out = tmp_path_factory.mktemp("run") / "results"
    assert main(["run", "--data", str(FIXTURES / "stroke_sample.csv"), "--out", str(out), *FAST]) == EXIT_OK
    return out


# ============ PARSER ============

def test_parser_leaves_unset_options_empty():
    args = build_parser().parse_args(["run", "--algorithms", "nb, lr"])
    assert args.algorithms == ["nb", "lr"]
    assert args.normalize is None
    assert args.save_models is None
    assert args.seed is None


def test_subcommand_required():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


# ============ PREPROCESS ============

def test_preprocess_matches_golden_file(sample_csv, golden_encoded, tmp_path):
    assert main(["preprocess", "--data", str(sample_csv), "--out", str(tmp_path)]) == EXIT_OK
    written = pd.read_csv(tmp_path / "preprocessed" / "encoded.csv")
    pd.testing.assert_frame_equal(written, pd.read_csv(golden_encoded), check_dtype=False)
    report = json.loads((tmp_path / "preprocessed" / "preprocessing.json").read_text())
    assert report["rows_after_drop"] == 18


def test_missing_data_file_is_usage_error(tmp_path):
    code = main(["preprocess", "--data", str(tmp_path / "absent.csv"), "--out", str(tmp_path)])
    assert code == EXIT_USAGE


def test_missing_data_path_is_usage_error(monkeypatch, tmp_path):
    monkeypatch.delenv("STROKE_DATA_PATH", raising=False)
    monkeypatch.chdir(tmp_path)
    assert main(["preprocess", "--out", str(tmp_path)]) == EXIT_USAGE
    assert main(["run", "--out", str(tmp_path)]) == EXIT_USAGE


def test_empty_algorithm_list_is_usage_error(sample_csv, tmp_path):
    code = main(["run", "--data", str(sample_csv), "--out", str(tmp_path), "--algorithms", ""])
    assert code == EXIT_USAGE


def test_unknown_algorithm_is_usage_error(sample_csv, tmp_path):
    code = main(["run", "--data", str(sample_csv), "--out", str(tmp_path), "--algorithms", "knn"])
    assert code == EXIT_USAGE


# ============ RUN ============

def test_run_writes_report_and_models(ran):
    report = load_report(ran / "report.json")
    assert [r.regime for r in report.regimes] == ["unbalanced", "balanced"]
    assert report.failed == []
    for regime in report.regimes:
        assert [a.algorithm for a in regime.algorithms] == ["dt", "svm", "nb", "lr"]
        for result in regime.algorithms:
            assert result.confusion.total == regime.rows
            assert len(result.folds) == 2
    assert report.regime("balanced").rows == 20
    assert (ran / "models" / "balanced" / "svm.json").is_file()
    assert (ran / "figures" / "fig6_accuracy.csv").is_file()


def test_rerun_reproduces_report(ran, sample_csv):
    first = normalized(load_report(ran / "report.json"))
    assert main(["run", "--data", str(sample_csv), "--out", str(ran), *FAST]) == EXIT_OK
    second = normalized(load_report(ran / "report.json"))
    assert first == second


def test_config_file_per_fold_balance(sample_csv, tmp_path):
    config = tmp_path / "experiment.toml"
    config.write_text('balance = "per-fold"\nsmote_k = 2\nalgorithms = ["nb"]\nregimes = ["balanced"]\n')
    out = tmp_path / "results"
    code = main([
        "run", "--config", str(config), "--data", str(sample_csv), "--out", str(out),
        "--tuning-k", "2", "--eval-k", "2", "--no-save-models",
    ])
    assert code == EXIT_OK
    report = load_report(out / "report.json")
    assert report.metadata["balance_mode"] == "per-fold"
    regime = report.regime("balanced")
    assert regime.rows == 18
    assert regime.result("nb").confusion.total == 18
    assert not (out / "models").exists()

    # 10 no stroke / 8 stroke; each 2-fold training half holds 5 / 4 before SMOTE
    assert regime.balance["folds"] == 2
    assert regime.balance["stroke"] == regime.balance["no_stroke"] == 5
    assert regime.balance["rows"] == 10


def test_unknown_config_key_is_usage_error(sample_csv, tmp_path):
    config = tmp_path / "experiment.toml"
    config.write_text("learning_rate = 0.1\n")
    assert main(["run", "--config", str(config), "--data", str(sample_csv)]) == EXIT_USAGE


# ============ REPORT ============

def test_report_roc_tables(ran, tmp_path):
    out = tmp_path / "fig9"
    assert main(["report", "--report", str(ran / "report.json"), "--figure", "fig9", "--out", str(out)]) == EXIT_OK
    names = sorted(p.name for p in out.iterdir())
    assert "fig9_auc.csv" in names
    assert "fig9_roc_unbalanced_nb.csv" in names
    roc = pd.read_csv(out / "fig9_roc_balanced_lr.csv")
    assert (roc["fpr"].iloc[0], roc["tpr"].iloc[0]) == (0.0, 0.0)
    assert (roc["fpr"].iloc[-1], roc["tpr"].iloc[-1]) == (1.0, 1.0)


def test_report_accuracy_and_all(ran, tmp_path):
    out = tmp_path / "figs"
    assert main(["report", "--report", str(ran / "report.json"), "--figure", "fig6", "--out", str(out)]) == EXIT_OK
    accuracy = pd.read_csv(out / "fig6_accuracy.csv")
    assert len(accuracy) == 8
    assert accuracy["accuracy"].between(0.0, 1.0).all()

    assert main(["report", "--report", str(ran / "report.json"), "--out", str(out)]) == EXIT_OK
    assert (out / "fig3_correlation.csv").is_file()
    assert (out / "fig10_timing.csv").is_file()


def test_unknown_figure_is_usage_error(ran):
    assert main(["report", "--report", str(ran / "report.json"), "--figure", "fig42"]) == EXIT_USAGE


def test_missing_report_is_usage_error(tmp_path):
    assert main(["report", "--report", str(tmp_path / "report.json")]) == EXIT_USAGE
