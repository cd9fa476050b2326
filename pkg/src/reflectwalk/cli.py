"""Command-line front end.

Exit status: 0 on success or when a checked order holds, 1 when it fails,
2 on bad usage or invalid input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

import numpy as np

from . import applications, gaussian, order
from .core import (Boundary, ReflectWalkError, WalkKind, WalkParams, exact_prob, jsonable,
                   load_boundary, serialize_pmf, serialize_stopping_time)
from .exact_engine import evolve_pmf, stopping_time_dist

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_boundary(text: str, horizon: int | None) -> Boundary:
    """``2,3,3``, ``const:k`` (length = horizon) or a JSON file path."""
    if text.startswith("const:"):
        if horizon is None:
            raise UsageError("const: boundaries need --horizon")
        value = Fraction(text[len("const:"):])
        return Boundary.constant(int(value) if value.denominator == 1 else value, horizon)
    if text.endswith(".json"):
        return load_boundary(text)
    try:
        values = [Fraction(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse boundary {text!r}") from exc
    return Boundary(tuple(int(v) if v.denominator == 1 else v for v in values))


def parse_grid(text: str) -> list[Fraction]:
    """``lo:hi:count`` with exact endpoints."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError("grid must look like lo:hi:count")
    return applications.exact_grid(exact_prob(parts[0]), exact_prob(parts[1]), int(parts[2]))


def _rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: str(v) for k, v in row.items()})
    return buf.getvalue()


def _emit(args, payload):
    """Write bytes, text or a JSON-able object to --out or stdout."""
    if isinstance(payload, bytes):
        payload = payload.decode()
    if not isinstance(payload, str):
        payload = json.dumps(jsonable(payload), indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def _require(args, *names):
    missing = [n for n in names if getattr(args, n.replace("-", "_")) is None]
    if missing:
        raise UsageError("missing " + ", ".join("--" + n for n in missing))


# ---------------------------------------------------------------- commands


def cmd_pmf(args):
    _require(args, "kind", "p", "n")
    pmf = evolve_pmf(WalkParams(args.kind, p=exact_prob(args.p)), args.n)
    _emit(args, serialize_pmf(pmf, args.format))
    return EXIT_OK


def cmd_stop_dist(args):
    _require(args, "kind", "p", "boundary", "horizon")
    b = parse_boundary(args.boundary, args.horizon)
    dist = stopping_time_dist(WalkParams(args.kind, p=exact_prob(args.p)), b, args.horizon)
    _emit(args, serialize_stopping_time(dist, args.format))
    return EXIT_OK


def cmd_check_order(args):
    _require(args, "kind", "horizon")
    if args.p_lower is not None or args.p_upper is not None:
        _require(args, "p-lower", "p-upper")
        report = order.check_lemma2_hypothesis(WalkParams(args.kind, p=exact_prob(args.p_lower)),
                                               WalkParams(args.kind, p=exact_prob(args.p_upper)),
                                               args.horizon)
    else:
        _require(args, "boundary")
        grid = parse_grid(args.grid)
        report = order.survival_monotone_sweep(args.kind, parse_boundary(args.boundary, args.horizon),
                                               grid, args.horizon)
    _emit(args, report.to_json())
    return EXIT_OK if report.holds else EXIT_FAIL


def cmd_check_lr(args):
    _require(args, "boundary", "p", "p-prime", "horizon")
    report = order.lr_order_stopping_time(parse_boundary(args.boundary, args.horizon),
                                          exact_prob(args.p), exact_prob(args.p_prime), args.horizon)
    _emit(args, report.to_json())
    return EXIT_OK if report.holds else EXIT_FAIL


def cmd_couple(args):
    _require(args, "kind", "p-lower", "p-upper", "horizon")
    lower = WalkParams(args.kind, p=exact_prob(args.p_lower))
    upper = WalkParams(args.kind, p=exact_prob(args.p_upper))
    try:
        coupling = order.build_monotone_coupling(lower, upper, args.horizon)
    except order.HypothesisViolatedError as exc:
        _emit(args, exc.report.to_json())
        return EXIT_FAIL
    lo, hi = coupling.sample(args.n_paths, args.seed)
    ordered = float(np.mean(np.all(lo <= hi, axis=1)))
    result = {"kind": args.kind.value, "horizon": args.horizon, "n_paths": args.n_paths,
              "seed": args.seed, "pathwise_ordered_fraction": ordered}
    _emit(args, result)
    return EXIT_OK if ordered == 1.0 else EXIT_FAIL


def cmd_gaussian_kernel(args):
    _require(args, "x", "mu")
    ys = np.linspace(0.0, args.y_max, args.points)
    dens = gaussian.folded_kernel_density(ys, args.x, args.mu)
    if args.format == "csv":
        _emit(args, _rows_to_csv([{"y": repr(float(y)), "density": repr(float(d))} for y, d in zip(ys, dens)]))
    else:
        _emit(args, {"x": args.x, "mu": args.mu,
                     "normalization": gaussian.kernel_normalization(args.x, args.mu),
                     "mixture": [list(pair) for pair in gaussian.folded_kernel_mixture_form(args.x, args.mu)],
                     "y": ys.tolist(), "density": dens.tolist()})
    return EXIT_OK


def cmd_brownian_mc(args):
    mus = [float(m) for m in args.mus.split(",")] if args.mus else [args.mu if args.mu is not None else 0.0]
    report = gaussian.brownian_functional_mc(mus, args.functional, args.n_steps, args.n_paths,
                                             args.seed, args.threshold)
    out = report.to_json()
    out["ordered"] = report.ordered()
    if args.format == "csv":
        rows = [{"mu": m, "estimate": e, "stderr": s}
                for m, e, s in zip(report.mus, report.estimates, report.stderr)]
        _emit(args, _rows_to_csv(rows))
    else:
        _emit(args, out)
    return EXIT_OK if len(mus) < 2 or out["ordered"] else EXIT_FAIL


def cmd_ruin(args):
    _require(args, "a", "p", "horizon")
    scenario = applications.RuinScenario(args.a, args.mode, exact_prob(args.p))
    dist = applications.ruin_duration_dist(scenario, args.horizon)
    if args.format == "csv":
        _emit(args, serialize_stopping_time(dist, "csv"))
    else:
        doc = json.loads(serialize_stopping_time(dist, "json"))
        doc["truncated_mean"] = jsonable(dist.truncated_mean())
        doc["scenario"] = {"a": scenario.a, "start_mode": scenario.start_mode.value, "p": str(scenario.p)}
        _emit(args, doc)
    return EXIT_OK


def cmd_sweep(args):
    _require(args, "a", "horizon")
    grid = parse_grid(args.grid)
    rows = applications.duration_sweep(args.a, args.mode, grid, args.horizon)
    half_grid = [g for g in grid if g <= Fraction(1, 2)]
    kind, level = applications.RuinScenario(args.a, args.mode, Fraction(1, 2)).walk()
    report = order.survival_monotone_sweep(kind, Boundary.constant(level, args.horizon), half_grid, args.horizon)
    if args.format == "csv":
        _emit(args, _rows_to_csv(rows))
    else:
        _emit(args, {"rows": rows, "maximizer": applications.maximizer_on_grid(rows),
                     "monotone": report.to_json()})
    return EXIT_OK if report.holds else EXIT_FAIL


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kind", type=WalkKind, choices=[WalkKind.S, WalkKind.U, WalkKind.V])
    common.add_argument("--p", help="exact probability, e.g. 1/3 or 0.25")
    common.add_argument("--mu", type=float)
    common.add_argument("--boundary", help="comma list, const:k, or a .json file")
    common.add_argument("--grid", default="0:1/2:11", help="lo:hi:count")
    common.add_argument("--horizon", type=int)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out")
    common.add_argument("--format", choices=["json", "csv"], default="json")

    parser = argparse.ArgumentParser(prog="reflectwalk",
                                     description="Exact and simulated ordering checks for reflected random walks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pmf", parents=[common], help="exact marginal law at time n")
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_pmf)

    p = sub.add_parser("stop-dist", parents=[common], help="exact first-passage law")
    p.set_defaults(func=cmd_stop_dist)

    p = sub.add_parser("check-order", parents=[common],
                       help="survival sweep over --grid, or one-step hypothesis with --p-lower/--p-upper")
    p.add_argument("--p-lower")
    p.add_argument("--p-upper")
    p.set_defaults(func=cmd_check_order)

    p = sub.add_parser("check-lr", parents=[common], help="likelihood-ratio order of |S| passage times")
    p.add_argument("--p-prime")
    p.set_defaults(func=cmd_check_lr)

    p = sub.add_parser("couple", parents=[common], help="sample a monotone coupling")
    p.add_argument("--p-lower")
    p.add_argument("--p-upper")
    p.add_argument("--n-paths", type=int, default=10_000)
    p.set_defaults(func=cmd_couple)

    p = sub.add_parser("gaussian-kernel", parents=[common], help="folded-normal one-step density")
    p.add_argument("--x", type=float)
    p.add_argument("--y-max", type=float, default=6.0)
    p.add_argument("--points", type=int, default=61)
    p.set_defaults(func=cmd_gaussian_kernel)

    p = sub.add_parser("brownian-mc", parents=[common], help="common-random-number Brownian functionals")
    p.add_argument("--mus", help="comma-separated drifts; overrides --mu")
    p.add_argument("--functional", choices=[f.value for f in gaussian.Functional], default="sup_abs_on_01")
    p.add_argument("--threshold", type=float)
    p.add_argument("--n-steps", type=int, default=1000)
    p.add_argument("--n-paths", type=int, default=100_000)
    p.set_defaults(func=cmd_brownian_mc)

    for name, func, helptext in (("ruin", cmd_ruin, "gambler's-ruin duration law"),
                                 ("sweep", cmd_sweep, "ruin duration across a p grid")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--a", type=int, help="total capital")
        p.add_argument("--mode", choices=[m.value for m in applications.StartMode], default="equal")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, ReflectWalkError, ValueError, OSError, KeyError) as exc:
        print(f"reflectwalk {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
