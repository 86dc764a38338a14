from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import TYPE_CHECKING, Any

from cgc.core.errors import DatasetFormatError
from cgc.core.paths import ARTIFACTS_DIR, DATA_DIR
from cgc.datasets.io import read_dataset

if TYPE_CHECKING:
    from argparse import Namespace
    from collections.abc import Iterable, Sequence

    from cgc.core.graph import Dataset


def announce(args: Namespace, message: str) -> None:
    """Progress line for humans; silent when stdout carries JSON."""
    if not getattr(args, "json", False):
        print(f"-> {message}")


def emit_json(payload: Any) -> None:
    print(json.dumps(payload, indent=4, sort_keys=True))


def resolve_dataset(name: str | Path | None) -> Path:
    """A dataset directory, given as a path or a name under the data dir."""
    if name is None:
        raise DatasetFormatError("no dataset given (use --dataset)")
    path = Path(name)
    if path.is_dir():
        return path
    if (DATA_DIR / path).is_dir():
        return DATA_DIR / path
    raise DatasetFormatError(
        f"dataset {name} is neither a directory nor found under {DATA_DIR}"
    )


def load_dataset(name: str | Path | None) -> Dataset:
    return read_dataset(resolve_dataset(name))


def artifact_dir(dataset: str, preset: str, seed: int) -> Path:
    return ARTIFACTS_DIR / f"{Path(dataset).name}-{preset}-seed{seed}"


def append_csv_row(
    path: Path, row: dict[str, object], columns: Sequence[str]
) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fresh = not path.exists() or path.stat().st_size == 0
    with open(path, "a", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=list(columns))
        if fresh:
            writer.writeheader()
        writer.writerow(row)


def read_csv_rows(paths: Iterable[Path]) -> list[dict[str, str]]:
    rows: list[dict[str, str]] = []
    for path in paths:
        with open(path, newline="", encoding="utf-8") as f:
            rows.extend(csv.DictReader(f))
    return rows
