from __future__ import annotations

from pathlib import Path
from traceback import format_exc
from typing import TYPE_CHECKING, Any

from cgc.commands.utils.helpers import (
    announce,
    artifact_dir,
    emit_json,
    load_dataset,
)
from cgc.condensers.pipeline import condense
from cgc.condensers.utils.types import PipelineConfig
from cgc.core.errors import CGCError
from cgc.core.logger_config import setup_logging
from cgc.core.paths import LOGS_DIR
from cgc.datasets.io import write_artifact

if TYPE_CHECKING:
    from argparse import Namespace

logger = setup_logging()

CONFIG_FLAGS = (
    "dataset",
    "preset",
    "ratio",
    "num_condensed",
    "K",
    "rule",
    "beta",
    "p",
    "tau",
    "mode",
    "method",
    "structure",
    "threshold",
    "alpha",
    "jitter",
    "seed",
    "workers",
)


def config_from_args(args: Namespace) -> PipelineConfig:
    overrides: dict[str, Any] = {
        key: getattr(args, key, None) for key in CONFIG_FLAGS
    }
    return PipelineConfig.from_sources(args.config, **overrides)


def run(args: Namespace) -> int:
    cfg = config_from_args(args)
    ds = load_dataset(cfg.dataset)
    out = (
        Path(args.out)
        if args.out
        else artifact_dir(cfg.dataset or ds.name, cfg.preset, cfg.seed)
    )
    announce(args, f"Condensing '{ds.name}' with preset {cfg.preset}")
    try:
        artifact = condense(ds, cfg)
        write_artifact(artifact, out)
    except CGCError:
        raise
    except Exception:
        logger.critical("An unhandled error occurred while condensing.")
        logger.critical(format_exc())
        print(f"\n!! A critical error occurred. See {LOGS_DIR} for details.")
        raise

    provenance = artifact.provenance
    if args.json:
        emit_json({"artifact": str(out), **provenance.model_dump(mode="json")})
        return 0
    announce(
        args,
        f"Wrote {provenance.num_condensed_nodes}-node"
        f" {provenance.structure} artifact to {out}"
        f" in {provenance.timings_ms['total']:.1f} ms",
    )
    for warning in provenance.warnings:
        announce(args, f"warning: {warning}")
    return 0
