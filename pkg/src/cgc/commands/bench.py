from __future__ import annotations

from time import perf_counter
from traceback import format_exc
from typing import TYPE_CHECKING

import numpy as np
from tqdm import tqdm

from cgc.commands.condense import config_from_args
from cgc.commands.utils.config import BENCH_PRESETS, BENCH_RUNS
from cgc.commands.utils.helpers import announce, emit_json, load_dataset
from cgc.condensers.pipeline import condense
from cgc.core.errors import CGCError
from cgc.core.logger_config import setup_logging
from cgc.core.paths import LOGS_DIR

if TYPE_CHECKING:
    from argparse import Namespace

    from cgc.condensers.utils.types import PipelineConfig
    from cgc.core.graph import Dataset

logger = setup_logging()


def time_condense(ds: Dataset, cfg: PipelineConfig, runs: int) -> list[float]:
    """Wall clock per condensation run in ms; loading is not timed."""
    timings = []
    for _ in tqdm(range(runs), desc=f"bench {cfg.preset}", leave=False):
        start = perf_counter()
        condense(ds, cfg)
        timings.append((perf_counter() - start) * 1000.0)
    return timings


def run(args: Namespace) -> int:
    presets = args.presets or list(BENCH_PRESETS)
    runs = args.runs or BENCH_RUNS
    results: dict[str, dict[str, float | list[float]]] = {}
    ds = None
    try:
        for preset in presets:
            args.preset = preset
            cfg = config_from_args(args)
            if ds is None:
                ds = load_dataset(cfg.dataset)
            announce(args, f"Timing {preset} on '{ds.name}' ({runs} runs)")
            timings = time_condense(ds, cfg, runs)
            results[preset] = {
                "median_ms": float(np.median(timings)),
                "runs_ms": timings,
            }
    except CGCError:
        raise
    except Exception:
        logger.critical("An unhandled error occurred while benchmarking.")
        logger.critical(format_exc())
        print(f"\n!! A critical error occurred. See {LOGS_DIR} for details.")
        raise

    if args.json:
        emit_json(results)
        return 0
    for preset, result in results.items():
        print(f"{preset:<20} median {result['median_ms']:>10.1f} ms")
    return 0
