import csv
import json
from argparse import Namespace

import pytest

from cgc.cli import main
from cgc.commands.evaluate import eval_config, evaluate
from cgc.core.errors import ConfigError
from cgc.evaluators.utils.types import EvalConfig, EvalReport


@pytest.fixture
def artifact_dir(sbm_dir, tmp_path):
    out = tmp_path / "artifact"
    main(
        ["condense", "--dataset", str(sbm_dir), "--ratio", "0.1"]
        + ["--out", str(out)]
    )
    return out


def _rows(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def test_evaluating_an_artifact_appends_a_row(artifact_dir, tmp_path):
    """Tests that evaluating an artifact appends one results row."""
    # Arrange
    results = tmp_path / "results.csv"
    report_path = tmp_path / "report.json"

    # Act
    exit_code = main(
        ["evaluate", "--artifact", str(artifact_dir), "--model", "sgc_ridge"]
        + ["--csv", str(results), "--out", str(report_path)]
    )

    # Assert
    assert exit_code == 0
    (row,) = _rows(results)
    assert row["dataset"] == "sbm-3x40"
    assert row["preset"] == "cgc_x"
    assert row["ratio"] == "0.1"
    assert row["model"] == "sgc_ridge"
    assert row["condense_ms"] != ""
    report = json.loads(report_path.read_text())
    assert report["mean"] == pytest.approx(float(row["acc_mean"]), abs=1e-6)


def test_rows_accumulate_under_one_header(artifact_dir, tmp_path):
    """Tests that repeated runs share a single CSV header."""
    results = tmp_path / "results.csv"
    argv = ["evaluate", "--artifact", str(artifact_dir)]
    argv += ["--model", "sgc_ridge", "--csv", str(results)]

    main(argv)
    main(argv + ["--seed", "1"])

    rows = _rows(results)
    assert [row["seed"] for row in rows] == ["0", "1"]


def test_whole_graph_baseline(sbm_dir, tmp_path, capsys):
    """Tests the whole-graph baseline row with a blank ratio."""
    results = tmp_path / "results.csv"

    exit_code = main(
        ["--json", "evaluate", "--whole", "--dataset", str(sbm_dir)]
        + ["--model", "sgc_ridge", "--csv", str(results)]
    )

    payload = json.loads(capsys.readouterr().out)
    assert exit_code == 0
    assert payload["model"] == "sgc_ridge"
    assert _rows(results)[0]["preset"] == "whole"
    assert _rows(results)[0]["ratio"] == ""


@pytest.mark.parametrize(
    "extra", [[], ["--whole", "--artifact", "somewhere"]]
)
def test_exactly_one_source_is_required(extra):
    """Tests that evaluate needs exactly one of --artifact and --dataset."""
    assert main(["evaluate"] + extra) == 2


def test_flags_update_the_base_config():
    """Tests that evaluation flags override the base settings."""
    args = Namespace(hidden=8, lr=None, epochs=3, model=None)

    cfg = eval_config(EvalConfig(lr=0.05), args)

    assert cfg.hidden == 8
    assert cfg.epochs == 3
    assert cfg.lr == 0.05


def test_invalid_flag_values_are_config_errors():
    """Tests that out-of-range evaluation flags raise ConfigError."""
    with pytest.raises(ConfigError):
        eval_config(EvalConfig(), Namespace(dropout=1.5))


@pytest.mark.parametrize(
    "model, target",
    [
        ("gcn2", "cgc.commands.evaluate.train_gcn2"),
        ("sgc_ridge", "cgc.commands.evaluate.eval_sgc_ridge"),
    ],
)
def test_evaluate_dispatches_on_the_model(mocker, sbm, model, target):
    """Tests that the model name selects the evaluator."""
    report = EvalReport(model=model, accuracies=[1.0])
    patched = mocker.patch(target, return_value=report)

    result = evaluate(sbm, sbm, EvalConfig(model=model))

    assert result is report
    patched.assert_called_once()
