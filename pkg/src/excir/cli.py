"""Command-line entry point: ``excir {score,block,classcond,transfer,agree}``."""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import io as eio
from .agreement import agreement
from .core import block_cir, cir_scores, class_conditioned_cir
from .data import CenteringSpec
from .errors import InputError, InvalidInput
from .transfer import TransferConfig, fraction_list, pareto_knee, run_transfer

log = logging.getLogger("excir")


def _centering_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--center", choices=("midmean", "median", "mean"), default="midmean")
    p.add_argument("--sketch", choices=("exact", "gk"), default="exact",
                   help="exact quartiles, or a Greenwald-Khanna sketch")
    p.add_argument("--epsilon", type=float, default=0.01, help="sketch rank accuracy")


def _output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", default=None, help="output path (default: stdout)")


def _data_args(p: argparse.ArgumentParser, target_required: bool) -> None:
    p.add_argument("--input", required=True, help="CSV file with a header row")
    if target_required:
        p.add_argument("--target", required=True, help="output column")
    p.add_argument("--groups", default=None, help='JSON {"groups": {name: [features]}}')
    p.add_argument("--weights", default=None, help="single-column CSV of row weights")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--k", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="excir", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="per-feature scores (plus groups if given)")
    _data_args(p, target_required=True)
    _centering_args(p)
    _output_args(p)

    p = sub.add_parser("block", help="feature-set scores only")
    _data_args(p, target_required=True)
    _centering_args(p)
    _output_args(p)

    p = sub.add_parser("classcond", help="one report per class score column")
    _data_args(p, target_required=False)
    p.add_argument("--class-cols", required=True, help="comma-separated class columns")
    _centering_args(p)
    _output_args(p)

    p = sub.add_parser("transfer", help="subsample sweep with agreement vs. the full run")
    p.add_argument("--input", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--groups", default=None)
    p.add_argument("--fractions", default="0.2,0.3,0.4,0.5,0.75,1.0")
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int, default=8)
    p.add_argument("--target-jaccard", type=float, default=0.8)
    _centering_args(p)
    _output_args(p)

    p = sub.add_parser("agree", help="agreement metrics between two score files")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--k", type=int, default=8)
    _output_args(p)
    return parser


def _spec(args) -> CenteringSpec:
    if args.sketch == "gk":
        return CenteringSpec(args.center, "sketch", args.epsilon)
    return CenteringSpec(args.center, "exact")


def _load(args, target=None, class_cols=None):
    table = eio.load_table(args.input, target, class_cols)
    groups = eio.load_groups(args.groups, table.feature_names) if args.groups else None
    weights = eio.load_weights(args.weights, table.n) if args.weights else None
    return table, groups, weights


def _top_k_meta(args, reports) -> dict:
    if args.k is None:
        return {}
    if args.k < 1:
        raise InvalidInput("--k must be positive")
    return {"k": args.k, "top_k": reports[0].ranks[:args.k]}


def _cmd_score(args) -> str:
    table, groups, weights = _load(args, args.target)
    report = cir_scores(table, args.target, groups, _spec(args), weights)
    return eio.reports_text([report], args.format, args.seed, **_top_k_meta(args, [report]))


def _cmd_block(args) -> str:
    if not args.groups:
        raise InvalidInput("block requires --groups")
    table, groups, weights = _load(args, args.target)
    report = block_cir(table, args.target, groups, _spec(args), weights)
    return eio.reports_text([report], args.format, args.seed)


def _cmd_classcond(args) -> str:
    cols = [c.strip() for c in args.class_cols.split(",") if c.strip()]
    if not cols:
        raise InvalidInput("--class-cols lists no columns")
    table, groups, weights = _load(args, None, cols)
    reports = class_conditioned_cir(table, cols, groups, _spec(args), weights)
    return eio.reports_text(reports, args.format, args.seed)


def _cmd_transfer(args) -> str:
    table = eio.load_table(args.input, args.target)
    groups = eio.load_groups(args.groups, table.feature_names) if args.groups else None
    config = TransferConfig(fraction_list(args.fractions), args.seed, args.k, args.repeats)
    spec = _spec(args)
    curve = run_transfer(table, args.target, groups, spec, config)
    knee = pareto_knee(curve, args.target_jaccard)
    if args.format == "csv":
        msg = f"knee: f={knee.fraction}" + (" (no fraction met the target)" if knee.no_knee else "")
        print(msg, file=sys.stderr)
    return eio.curve_text(curve, args.format, knee, args.target_jaccard, spec)


def _cmd_agree(args) -> str:
    a = eio.load_scores(args.a)
    b = eio.load_scores(args.b)
    if set(a) != set(b):
        raise InvalidInput("score files cover different features")
    names = sorted(a)
    k = min(args.k, len(names))
    report = agreement(np.array([a[s] for s in names]), np.array([b[s] for s in names]), k)
    return eio.agreement_text(report, args.format)


COMMANDS = {"score": _cmd_score, "block": _cmd_block, "classcond": _cmd_classcond,
            "transfer": _cmd_transfer, "agree": _cmd_agree}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        text = COMMANDS[args.command](args)
        eio.write_text(text, args.output)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:  # noqa: BLE001
        log.exception("internal error")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
