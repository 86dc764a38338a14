import csv
import json

import pytest

from cgc.cli import main
from cgc.commands.report import summarize, to_markdown
from cgc.evaluators.utils.config import REPORT_CSV_COLUMNS


def _row(preset, acc, seed, ms="10.0"):
    return {
        "dataset": "cora",
        "preset": preset,
        "ratio": "0.026",
        "model": "gcn2",
        "acc_mean": str(acc),
        "acc_std": "0.0",
        "condense_ms": ms,
        "seed": str(seed),
    }


@pytest.fixture
def results_csv(tmp_path):
    path = tmp_path / "results.csv"
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=REPORT_CSV_COLUMNS)
        writer.writeheader()
        writer.writerow(_row("cgc", 0.80, 0, "10.0"))
        writer.writerow(_row("cgc", 0.82, 1, "30.0"))
        writer.writerow(_row("cgc_x", 0.79, 0))
    return path


def test_summary_groups_runs_in_percent():
    """Tests that runs group per setting with accuracy in percent."""
    summary = summarize(
        [_row("cgc", 0.80, 0), _row("cgc", 0.82, 1), _row("simdm", 0.7, 0)]
    )

    assert len(summary) == 2
    assert summary[0]["preset"] == "cgc"
    assert summary[0]["runs"] == 2
    assert summary[0]["acc_mean"] == "81.0"
    assert summary[0]["acc_std"] == "1.0"


def test_missing_timings_stay_blank():
    """Tests that groups without timings keep a blank timing cell."""
    summary = summarize([_row("whole", 0.8, 0, ms="")])

    assert summary[0]["condense_ms"] == ""


def test_markdown_has_a_header_and_a_line_per_group():
    """Tests the markdown table layout."""
    summary = summarize([_row("cgc", 0.8, 0)])

    lines = to_markdown(summary).splitlines()

    assert lines[0].startswith("| dataset | preset")
    assert len(lines) == 3
    assert "| 80.0 |" in lines[2]


def test_report_writes_markdown_and_csv(results_csv, tmp_path, capsys):
    """Tests that report writes both summary files."""
    # Arrange
    out = tmp_path / "summary"

    # Act
    exit_code = main(
        ["report", "--input", str(results_csv), "--out", str(out)]
    )

    # Assert
    assert exit_code == 0
    assert (out / "summary.md").exists()
    with open(out / "summary.csv", newline="") as f:
        rows = list(csv.DictReader(f))
    assert [row["preset"] for row in rows] == ["cgc", "cgc_x"]
    assert rows[0]["condense_ms"] == "20.000"
    assert "3 rows into 2 groups" in capsys.readouterr().out


def test_report_rewrites_the_summary(results_csv, tmp_path, capsys):
    """Tests that a second report overwrites the earlier summary."""
    out = tmp_path / "summary"
    argv = ["--json", "report", "--input", str(results_csv)]
    argv += ["--out", str(out)]

    main(argv)
    capsys.readouterr()
    main(argv)

    with open(out / "summary.csv", newline="") as f:
        assert len(list(csv.DictReader(f))) == 2
    payload = json.loads(capsys.readouterr().out)
    assert len(payload) == 2


def test_malformed_rows_exit_with_data_code(tmp_path):
    """Tests that a results file with bad rows exits with code 3."""
    path = tmp_path / "results.csv"
    path.write_text("dataset,preset\ncora,cgc\n")

    assert main(["report", "--input", str(path)]) == 3


def test_missing_input_exits_with_data_code(tmp_path):
    assert main(["report", "--input", str(tmp_path / "absent.csv")]) == 3
