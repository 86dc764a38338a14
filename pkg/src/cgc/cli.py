import argparse
import sys
from collections.abc import Callable, Sequence
from pathlib import Path

from cgc.commands import (
    bench,
    condense,
    convert,
    evaluate,
    report,
    verify_props,
)
from cgc.core.errors import CGCError

COMMAND_MAP: dict[str, Callable[[argparse.Namespace], int]] = {
    "convert": convert.run,
    "condense": condense.run,
    "evaluate": evaluate.run,
    "bench": bench.run,
    "verify-props": verify_props.run,
    "report": report.run,
}
COMMAND_HELP = {
    "convert": "Convert an edge list or Planetoid files to a dataset",
    "condense": "Condense a dataset into a small synthetic graph",
    "evaluate": "Train on a condensed graph, test on the original",
    "bench": "Median condensation wall clock per preset",
    "verify-props": "Numerically check the matching identities and bounds",
    "report": "Aggregate evaluation CSV rows into a summary table",
}


def _add_pipeline_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON config file")
    parser.add_argument("--dataset", help="Dataset directory or name")
    parser.add_argument("--ratio", type=float)
    parser.add_argument("--num-condensed", dest="num_condensed", type=int)
    parser.add_argument("--K", type=int, help="Propagation depth")
    parser.add_argument("--rule", choices=["sgc", "ppr", "mean"])
    parser.add_argument("--beta", type=float, help="PPR restart weight")
    parser.add_argument("--p", type=float, help="Augmentation percentage")
    parser.add_argument("--tau", type=float, help="Weighting temperature")
    parser.add_argument("--mode", choices=["softmax", "linear", "uniform"])
    parser.add_argument("--method", choices=["kmeans", "random"])
    parser.add_argument("--structure", choices=["identity", "adjacency"])
    parser.add_argument("--threshold", type=float, help="Cosine threshold")
    parser.add_argument("--alpha", type=float, help="Smoothness weight")
    parser.add_argument("--jitter", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--workers", type=int)


def _add_eval_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", choices=["gcn2", "sgc_ridge"])
    parser.add_argument("--hidden", type=int)
    parser.add_argument("--lr", type=float)
    parser.add_argument("--weight-decay", dest="weight_decay", type=float)
    parser.add_argument("--dropout", type=float)
    parser.add_argument("--epochs", type=int)
    parser.add_argument("--repeats", type=int)
    parser.add_argument("--ridge", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cgc",
        description="Training-free graph condensation toolkit",
        allow_abbrev=False,
    )
    parser.add_argument(
        "--json",
        action="store_true",
        help="Print machine-readable JSON on stdout",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    def _command(name: str) -> argparse.ArgumentParser:
        sub = commands.add_parser(
            name, help=COMMAND_HELP[name], allow_abbrev=False
        )
        # SUPPRESS keeps the global value when the flag is not repeated here
        sub.add_argument(
            "--json",
            action="store_true",
            default=argparse.SUPPRESS,
            help="Print machine-readable JSON on stdout",
        )
        return sub

    sub = _command("convert")
    sub.add_argument("--format", choices=["edgelist", "planetoid"])
    sub.add_argument("--name", required=True)
    sub.add_argument("--out", type=Path)
    sub.add_argument("--raw", type=Path, help="Planetoid raw directory")
    sub.add_argument(
        "--raw-features",
        dest="raw_features",
        action="store_true",
        help="Keep Planetoid features unnormalized",
    )
    sub.add_argument("--edges")
    sub.add_argument("--features")
    sub.add_argument("--labels")
    sub.add_argument("--train")
    sub.add_argument("--val")
    sub.add_argument("--test")
    sub.add_argument(
        "--task", choices=["transductive", "inductive"], default="transductive"
    )
    sub.set_defaults(format="edgelist")

    sub = _command("condense")
    sub.add_argument(
        "--preset",
        choices=[
            "cgc",
            "cgc_x",
            "simdm",
            "no_aug",
            "no_cal",
            "random_partition",
        ],
    )
    sub.add_argument("--out", type=Path)
    _add_pipeline_flags(sub)

    sub = _command("evaluate")
    sub.add_argument("--artifact", type=Path)
    sub.add_argument(
        "--whole",
        action="store_true",
        help="Train on the original graph instead of an artifact",
    )
    sub.add_argument("--config", type=Path)
    sub.add_argument("--dataset")
    sub.add_argument("--K", type=int)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--csv", type=Path, help="CSV file to append to")
    sub.add_argument("--out", type=Path, help="Report JSON path")
    _add_eval_flags(sub)

    sub = _command("bench")
    sub.add_argument(
        "--preset",
        dest="presets",
        action="append",
        help="Preset to time; repeat for several",
    )
    sub.add_argument("--runs", type=int)
    _add_pipeline_flags(sub)

    sub = _command("verify-props")
    sub.add_argument("--seed", type=int)
    sub.add_argument("--draws", type=int)

    sub = _command("report")
    sub.add_argument(
        "--input",
        dest="inputs",
        type=Path,
        action="append",
        help="Evaluation CSV; repeat for several",
    )
    sub.add_argument("--out", type=Path, help="Output directory")

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMAND_MAP[args.command](args)
    except CGCError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
