"""Command line front end.

Three subcommands: ``ci`` computes a confidence interval for one
observation, ``coverage`` sweeps the exact coverage curve to a CSV
file, and ``support`` inspects the estimator's support grid.  All
numerical output is printed with 9 significant digits; the optional
machine-readable report is a flat JSON object whose values survive a
round trip at that precision.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import ci as ci_mod
from . import coverage as cov_mod
from .mixture import (
    Model,
    NotASupportPoint,
    QuadratureFailure,
    neighbors,
    support_grid,
)

__all__ = ["main", "build_parser"]


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--w1", type=float, required=True,
                   help="weight of the first sample, strictly between 0 and 1")
    p.add_argument("--n1", type=int, required=True, help="first sample size")
    p.add_argument("--n2", type=int, required=True, help="second sample size")


def _check_model_flags(parser: argparse.ArgumentParser, args) -> Model:
    if not 0.0 < args.w1 < 1.0:
        parser.error("--w1 must lie strictly between 0 and 1")
    if args.n1 < 1:
        parser.error("--n1 must be at least 1")
    if args.n2 < 1:
        parser.error("--n2 must be at least 1")
    return Model(args.n1, args.n2, args.w1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="binmix",
        description="Exact confidence intervals for a weighted sum of two "
                    "binomial proportions, with coverage diagnostics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ci = sub.add_parser("ci", help="compute a confidence interval")
    _add_model_flags(p_ci)
    p_ci.add_argument("--k1", type=int, required=True, help="successes in sample 1")
    p_ci.add_argument("--k2", type=int, required=True, help="successes in sample 2")
    p_ci.add_argument("--gamma", type=float, default=0.95, help="confidence level")
    p_ci.add_argument("--method", choices=("standard", "shortest", "randomized"),
                      default="randomized")
    p_ci.add_argument("--y", type=float, default=None,
                      help="auxiliary uniform draw for the randomized method")
    p_ci.add_argument("--seed", type=int, default=None,
                      help="seed used to draw y when --y is absent")
    p_ci.add_argument("--json", type=str, default=None, metavar="PATH",
                      help="also write a flat JSON report")

    p_cov = sub.add_parser("coverage", help="sweep the exact coverage curve")
    _add_model_flags(p_cov)
    p_cov.add_argument("--method", choices=("standard", "shortest", "randomized"),
                       required=True)
    p_cov.add_argument("--gamma", type=float, default=0.95)
    p_cov.add_argument("--grid", type=int, default=99,
                       help="number of interior vartheta grid points")
    p_cov.add_argument("--y-nodes", type=int, default=64, dest="y_nodes",
                       help="midpoint nodes averaging the randomized draw")
    p_cov.add_argument("--out", type=str, required=True, metavar="PATH",
                       help="CSV output path")

    p_sup = sub.add_parser("support", help="inspect the support grid")
    _add_model_flags(p_sup)
    p_sup.add_argument("--around", type=float, default=None,
                       help="show the grid neighbours of this support value")
    return parser


def _cmd_ci(parser: argparse.ArgumentParser, args) -> int:
    model = _check_model_flags(parser, args)
    if not 0 <= args.k1 <= args.n1:
        parser.error(f"--k1 is {args.k1} but must lie in [0, {args.n1}]")
    if not 0 <= args.k2 <= args.n2:
        parser.error(f"--k2 is {args.k2} but must lie in [0, {args.n2}]")
    if not 0.5 < args.gamma < 1.0:
        parser.error("--gamma must lie strictly between 0.5 and 1")
    if args.y is not None and not 0.0 <= args.y <= 1.0:
        parser.error("--y must lie in [0, 1]")
    if args.method == "randomized" and args.y is None and args.seed is None:
        parser.error("--method randomized requires --y or --seed for reproducibility")

    req = ci_mod.IntervalRequest(model, args.k1, args.k2, args.gamma,
                                 args.method, args.y, args.seed)
    y_used: float | None = None
    try:
        if args.method == "standard":
            interval = ci_mod.standard_ci(req)
        elif args.method == "shortest":
            interval = ci_mod.shortest_ci(req)
        else:
            y_used = ci_mod.resolve_y(req)
            req = ci_mod.IntervalRequest(model, args.k1, args.k2, args.gamma,
                                         args.method, y_used, args.seed)
            interval = ci_mod.shortest_randomized_ci(req)
    except (QuadratureFailure, ci_mod.RootBracketFailure) as exc:
        print(f"error during interval solving: {exc}", file=sys.stderr)
        return 1

    u = req.u
    reflected = u > 0.5
    lines = [
        f"w1={_fmt(args.w1)}, n1={args.n1}, n2={args.n2}, "
        f"k1={args.k1}, k2={args.k2}, gamma={_fmt(args.gamma)}",
        f"u={_fmt(u)}, method={args.method}"
        + (f", y={_fmt(y_used)}" if y_used is not None else ""),
        f"gamma1={_fmt(interval.gamma1)}, sided={interval.sided}"
        + (", reflected for u above one half" if reflected else ""),
        f"interval ({_fmt(interval.lower)}, {_fmt(interval.upper)}), "
        f"length {_fmt(interval.length)}",
    ]
    print("\n".join(lines))

    if args.json is not None:
        doc: dict[str, object] = {
            "w1": float(_fmt(args.w1)),
            "n1": args.n1,
            "n2": args.n2,
            "k1": args.k1,
            "k2": args.k2,
            "gamma": float(_fmt(args.gamma)),
            "u": float(_fmt(u)),
            "method": args.method,
            "gamma1": float(_fmt(interval.gamma1)),
            "lower": float(_fmt(interval.lower)),
            "upper": float(_fmt(interval.upper)),
            "length": float(_fmt(interval.length)),
            "sided": interval.sided,
            "reflected": reflected,
        }
        if y_used is not None:
            doc["y"] = float(_fmt(y_used))
        with open(args.json, "w") as fh:
            json.dump(doc, fh, sort_keys=True)
            fh.write("\n")
    return 0


def _cmd_coverage(parser: argparse.ArgumentParser, args) -> int:
    model = _check_model_flags(parser, args)
    if not 0.5 < args.gamma < 1.0:
        parser.error("--gamma must lie strictly between 0.5 and 1")
    if args.grid < 1:
        parser.error("--grid must be at least 1")
    if args.y_nodes < 1:
        parser.error("--y-nodes must be at least 1")
    cfg = cov_mod.SweepConfig(args.grid, args.y_nodes, args.method, args.gamma)
    try:
        points = cov_mod.sweep(model, cfg)
    except (QuadratureFailure, ci_mod.RootBracketFailure, RuntimeError) as exc:
        print(f"error during coverage sweep: {exc}", file=sys.stderr)
        return 1
    with open(args.out, "w") as fh:
        cov_mod.write_csv(points, fh)
    covs = [p.coverage for p in points]
    print(f"wrote {len(points)} rows to {args.out}")
    print(f"coverage min={_fmt(min(covs))} max={_fmt(max(covs))}")
    return 0


def _cmd_support(parser: argparse.ArgumentParser, args) -> int:
    model = _check_model_flags(parser, args)
    grid = support_grid(model)
    print(f"size {len(grid)}")
    if args.around is not None:
        try:
            u_minus, u_plus = neighbors(grid, args.around)
        except NotASupportPoint:
            parser.error(f"--around value {args.around!r} is not a support value")
        i = grid.locate(args.around)
        print(f"{_fmt(u_minus)} {_fmt(float(grid.values[i]))} {_fmt(u_plus)}")
    else:
        for v in grid.values:
            print(_fmt(float(v)))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "ci":
        return _cmd_ci(parser, args)
    if args.command == "coverage":
        return _cmd_coverage(parser, args)
    return _cmd_support(parser, args)


if __name__ == "__main__":
    sys.exit(main())
