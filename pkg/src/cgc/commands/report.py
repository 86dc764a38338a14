from __future__ import annotations

from collections import defaultdict
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from cgc.commands.utils.config import (
    SUMMARY_COLUMNS,
    SUMMARY_CSV,
    SUMMARY_MARKDOWN,
)
from cgc.commands.utils.helpers import (
    announce,
    append_csv_row,
    emit_json,
    read_csv_rows,
)
from cgc.core.errors import DataError
from cgc.core.logger_config import setup_logging
from cgc.evaluators.utils.config import RESULTS_CSV

if TYPE_CHECKING:
    from argparse import Namespace

logger = setup_logging()


def _mean_or_blank(values: list[str]) -> str:
    numbers = [float(v) for v in values if v != ""]
    return f"{np.mean(numbers):.3f}" if numbers else ""


def summarize(rows: list[dict[str, str]]) -> list[dict[str, object]]:
    """One row per (dataset, preset, ratio, model); accuracies are averaged
    over runs and reported in percent.
    """
    groups: dict[tuple[str, ...], list[dict[str, str]]] = defaultdict(list)
    for row in rows:
        key = (row["dataset"], row["preset"], row["ratio"], row["model"])
        groups[key].append(row)

    summary: list[dict[str, object]] = []
    for (dataset, preset, ratio, model), members in sorted(groups.items()):
        accuracies = np.array([float(r["acc_mean"]) for r in members])
        summary.append(
            {
                "dataset": dataset,
                "preset": preset,
                "ratio": ratio,
                "model": model,
                "runs": len(members),
                "acc_mean": f"{100.0 * accuracies.mean():.1f}",
                "acc_std": f"{100.0 * accuracies.std():.1f}",
                "condense_ms": _mean_or_blank(
                    [r["condense_ms"] for r in members]
                ),
            }
        )
    return summary


def to_markdown(summary: list[dict[str, object]]) -> str:
    lines = [
        "| " + " | ".join(SUMMARY_COLUMNS) + " |",
        "|" + "---|" * len(SUMMARY_COLUMNS),
    ]
    for row in summary:
        lines.append(
            "| " + " | ".join(str(row[c]) for c in SUMMARY_COLUMNS) + " |"
        )
    return "\n".join(lines) + "\n"


def run(args: Namespace) -> int:
    inputs = [Path(p) for p in args.inputs] if args.inputs else [RESULTS_CSV]
    try:
        rows = read_csv_rows(inputs)
    except (OSError, KeyError) as exc:
        raise DataError(f"cannot read result rows: {exc}") from exc
    try:
        summary = summarize(rows)
    except (KeyError, ValueError) as exc:
        raise DataError(f"malformed result row: {exc}") from exc

    out_dir = Path(args.out) if args.out else SUMMARY_MARKDOWN.parent
    markdown_path = out_dir / SUMMARY_MARKDOWN.name
    csv_path = out_dir / SUMMARY_CSV.name
    out_dir.mkdir(parents=True, exist_ok=True)
    markdown_path.write_text(to_markdown(summary), encoding="utf-8")
    csv_path.unlink(missing_ok=True)
    for row in summary:
        append_csv_row(csv_path, row, SUMMARY_COLUMNS)

    if args.json:
        emit_json(summary)
    else:
        announce(
            args,
            f"Summarized {len(rows)} rows into {len(summary)} groups"
            f" ({markdown_path})",
        )
    return 0
