from __future__ import annotations

from typing import TYPE_CHECKING

from cgc.commands.utils.helpers import announce, emit_json
from cgc.core.logger_config import setup_logging
from cgc.theory.checks import verify_props

if TYPE_CHECKING:
    from argparse import Namespace

logger = setup_logging()


def run(args: Namespace) -> int:
    """Exit code 1 when any check fails."""
    kwargs = {
        key: value
        for key in ("seed", "draws")
        if (value := getattr(args, key, None)) is not None
    }
    announce(args, "Running numerical checks")
    reports = verify_props(**kwargs)

    if args.json:
        emit_json([report.model_dump(mode="json") for report in reports])
    else:
        print(f"{'check':<28} {'residual':>12} {'tolerance':>10} {'':>5}")
        for report in reports:
            status = "ok" if report.passed else "FAIL"
            print(
                f"{report.name:<28} {report.residual:>12.3e}"
                f" {report.tolerance:>10.1e} {status:>5}"
            )
    return 0 if all(report.passed for report in reports) else 1
