from __future__ import annotations

from pathlib import Path
from traceback import format_exc
from typing import TYPE_CHECKING, Any

from pydantic import ValidationError

from cgc.commands.utils.helpers import (
    announce,
    append_csv_row,
    emit_json,
    load_dataset,
)
from cgc.condensers.utils.types import PipelineConfig
from cgc.core.errors import CGCError, ConfigError
from cgc.core.logger_config import setup_logging
from cgc.core.paths import LOGS_DIR
from cgc.datasets.io import read_artifact
from cgc.evaluators.gcn import train_gcn2
from cgc.evaluators.sgc_ridge import eval_sgc_ridge
from cgc.evaluators.utils.config import REPORT_CSV_COLUMNS, RESULTS_CSV
from cgc.evaluators.utils.types import EvalConfig

if TYPE_CHECKING:
    from argparse import Namespace

    from cgc.core.graph import Dataset
    from cgc.core.types import CondensedGraph
    from cgc.evaluators.utils.types import EvalReport

logger = setup_logging()

EVAL_FLAGS = (
    "model",
    "hidden",
    "lr",
    "weight_decay",
    "dropout",
    "epochs",
    "repeats",
    "ridge",
    "K",
    "seed",
)


def eval_config(base: EvalConfig, args: Namespace) -> EvalConfig:
    """`base` updated with the evaluation flags the user passed."""
    updates: dict[str, Any] = {
        key: value
        for key in EVAL_FLAGS
        if (value := getattr(args, key, None)) is not None
    }
    try:
        return EvalConfig.model_validate(base.model_dump() | updates)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc


def evaluate(
    source: CondensedGraph | Dataset, original: Dataset, cfg: EvalConfig
) -> EvalReport:
    if cfg.model == "sgc_ridge":
        return eval_sgc_ridge(source, original, K=cfg.K, ridge=cfg.ridge)
    return train_gcn2(source, original, cfg)


def run(args: Namespace) -> int:
    if (args.artifact is None) == (not args.whole):
        raise ConfigError("give exactly one of --artifact and --whole")

    base = EvalConfig()
    dataset = args.dataset
    preset: str = "whole"
    ratio: float | None = None
    condense_ms: float | None = None
    artifact = None
    if args.artifact is not None:
        artifact = read_artifact(args.artifact)
        snapshot = artifact.provenance.config
        try:
            base = EvalConfig.model_validate(snapshot.get("eval", {}))
        except ValidationError as exc:
            raise ConfigError(f"invalid eval snapshot: {exc}") from exc
        dataset = dataset or snapshot.get("dataset")
        preset = artifact.provenance.preset
        ratio = snapshot.get("ratio")
        condense_ms = artifact.provenance.timings_ms.get("total")
    if args.config:
        base = PipelineConfig.from_sources(args.config).eval
    cfg = eval_config(base, args)

    original = load_dataset(dataset)
    source = original if artifact is None else artifact.graph
    announce(
        args,
        f"Evaluating {preset} on '{original.name}' with {cfg.model}"
        f" ({cfg.repeats if cfg.model == 'gcn2' else 1} repeats)",
    )
    try:
        report = evaluate(source, original, cfg)
    except CGCError:
        raise
    except Exception:
        logger.critical("An unhandled error occurred while evaluating.")
        logger.critical(format_exc())
        print(f"\n!! A critical error occurred. See {LOGS_DIR} for details.")
        raise

    csv_path = Path(args.csv) if args.csv else RESULTS_CSV
    row = report.csv_row(
        original.name, preset, ratio, condense_ms, cfg.seed
    )
    append_csv_row(csv_path, row, REPORT_CSV_COLUMNS)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(report.model_dump_json(indent=4) + "\n")

    if args.json:
        emit_json(report.model_dump(mode="json"))
        return 0
    announce(
        args,
        f"Test accuracy {report.mean:.4f} +- {report.std:.4f}"
        f" (appended to {csv_path})",
    )
    for flag in report.flags:
        announce(args, f"warning: {flag}")
    return 0
