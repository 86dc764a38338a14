from __future__ import annotations

from pathlib import Path
from traceback import format_exc
from typing import TYPE_CHECKING

from cgc.commands.utils.helpers import announce, emit_json
from cgc.core.errors import CGCError, ParseError
from cgc.core.logger_config import setup_logging
from cgc.core.paths import DATA_DIR, LOGS_DIR
from cgc.datasets.convert import (
    convert_edgelist,
    convert_planetoid,
    describe_dataset,
)
from cgc.datasets.io import write_dataset
from cgc.datasets.utils.types import SplitLines

if TYPE_CHECKING:
    from argparse import Namespace

    from cgc.core.graph import Dataset

logger = setup_logging()


def _read_lines(path: str | None, what: str) -> list[str]:
    if path is None:
        raise ParseError(f"the edgelist format needs --{what}")
    try:
        return Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ParseError(f"cannot read {what} file {path}: {exc}") from exc


def _convert(args: Namespace) -> Dataset:
    if args.format == "planetoid":
        if args.raw is None:
            raise ParseError("the planetoid format needs --raw")
        return convert_planetoid(
            args.raw, args.name, normalize_features=not args.raw_features
        )
    splits: SplitLines = {
        "train": _read_lines(args.train, "train"),
        "val": _read_lines(args.val, "val"),
        "test": _read_lines(args.test, "test"),
    }
    return convert_edgelist(
        _read_lines(args.edges, "edges"),
        _read_lines(args.features, "features"),
        _read_lines(args.labels, "labels"),
        splits,
        task=args.task,
        name=args.name,
    )


def run(args: Namespace) -> int:
    out = Path(args.out) if args.out else DATA_DIR / args.name
    announce(args, f"Converting '{args.name}' ({args.format}) into {out}")
    try:
        ds = _convert(args)
        write_dataset(ds, out)
    except CGCError:
        raise
    except Exception:
        logger.critical("An unhandled error occurred while converting.")
        logger.critical(format_exc())
        print(f"\n!! A critical error occurred. See {LOGS_DIR} for details.")
        raise

    stats = describe_dataset(ds)
    if args.json:
        emit_json(dict(stats))
    else:
        announce(
            args,
            f"{stats['num_nodes']} nodes, {stats['num_edges']} edges,"
            f" {stats['num_classes']} classes, {stats['num_features']}"
            f" features ({stats['num_train']}/{stats['num_val']}"
            f"/{stats['num_test']} train/val/test)",
        )
    return 0
