"""Command-line front end: solve, rearrange, star, check, compare, audit, gap,
and example subcommands over JSON step-function files.

Outputs are deterministic for a fixed command line: floats are serialized at
full round-trip precision, JSON keys are sorted, and every random corpus is
seeded. Exit codes: 0 success, 1 a mathematical check failed, 2 bad input or
I/O trouble.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import compare as compare_mod
from . import gap as gap_mod
from . import rearrange as rearrange_mod
from .errors import InternalError, RodsymError
from .piecewise import StepFunction, extrema, lp_norm
from .solver import (
    FULL,
    PI,
    dirichlet_solve,
    neumann_solve,
    robin_solve,
)


class CliError(Exception):
    """Input or usage problem; maps to exit code 2."""


def _plain(obj):
    """Recursively convert numpy scalars/arrays so json can serialize them."""
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def _dumps(obj):
    return json.dumps(_plain(obj), sort_keys=True)


def _fmt(x):
    return format(float(x), ".17g")


def _load_step(path):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(
            f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    return StepFunction.from_dict(data)


def _write(text, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _parse_bc(spec):
    if spec in ("neumann", "dirichlet"):
        return spec, None
    if spec.startswith("robin:"):
        try:
            return "robin", float(spec.split(":", 1)[1])
        except ValueError as exc:
            raise CliError(f"bad robin parameter in {spec!r}") from exc
    raise CliError(f"bad boundary condition {spec!r}; use robin:<alpha>, neumann, or dirichlet")


# ---------------------------------------------------------------------------
# subcommand handlers

def _cmd_solve(args):
    kind, alpha = _parse_bc(args.bc)
    f = _load_step(args.infile)
    if kind == "robin":
        u = robin_solve(f, alpha)
    elif kind == "dirichlet":
        u = dirichlet_solve(f)
    else:
        u = neumann_solve(f)
    fmt = args.format or ("csv" if (args.out or "").endswith(".csv") else "json")
    if fmt == "csv":
        xs = np.linspace(u.interval.lo, u.interval.hi, args.grid)
        ys = u(xs)
        lines = ["x,u"] + [f"{_fmt(x)},{_fmt(y)}" for x, y in zip(xs, ys)]
        _write("\n".join(lines) + "\n", args.out)
    else:
        _write(_dumps(u.to_dict()) + "\n", args.out)
    return 0


def _cmd_rearrange(args):
    f = _load_step(args.infile)
    if args.mode == "dec":
        g = rearrange_mod.decreasing_rearrangement(f)
    else:
        g = rearrange_mod.symmetric_decreasing_rearrangement(f)
    _write(_dumps(g.to_dict()) + "\n", args.out)
    return 0


def _cmd_star(args):
    f = _load_step(args.infile)
    curve = rearrange_mod.star_function(f)
    if args.format == "csv":
        lines = ["t,star"] + [
            f"{_fmt(t)},{_fmt(v)}" for t, v in zip(curve.nodes, curve.values)
        ]
        _write("\n".join(lines) + "\n", args.out)
    else:
        payload = {
            "length": curve.length,
            "nodes": list(curve.nodes),
            "values": list(curve.values),
        }
        _write(_dumps(payload) + "\n", args.out)
    return 0


def _check_instance(which, rng, n_grid):
    if which == "hl":
        f = compare_mod.random_step(rng, FULL, "signed")
        g = compare_mod.random_step(rng, FULL, "signed")
        return rearrange_mod.hardy_littlewood_check(f, g)
    if which == "rs":
        f = compare_mod.random_step(rng, FULL, "nonneg")
        g = compare_mod.random_step(rng, FULL, "nonneg")
        h = compare_mod.random_step(rng, FULL, "nonneg")
        return rearrange_mod.riesz_sobolev_check(f, g, h, n_grid)
    f = compare_mod.random_step(rng, FULL, "signed")
    g = compare_mod.random_step(rng, FULL, "signed")
    h = compare_mod.random_step(rng, FULL, "signed")
    return rearrange_mod.baernstein_check(f, g, h, n_grid)


def _cmd_check(args):
    lines = []
    all_pass = True
    for i in range(args.count):
        rng = np.random.default_rng([args.seed, i])
        res = _check_instance(args.which, rng, args.grid)
        all_pass = all_pass and res.passed
        lines.append(
            _dumps(
                {
                    "index": i,
                    "check": res.name,
                    "lhs": res.lhs,
                    "rhs": res.rhs,
                    "margin": res.margin,
                    "tol": res.tol,
                    "pass": res.passed,
                }
            )
        )
    _write("\n".join(lines) + "\n", args.out)
    return 0 if all_pass else 1


def _cmd_compare(args):
    f = _load_step(args.infile)
    if args.which == "robin":
        if args.alpha is None:
            raise CliError("robin comparison needs --alpha")
        report = compare_mod.robin_compare(f, args.alpha)
    else:
        if args.alpha is not None:
            raise CliError(f"--alpha does not apply to the {args.which} comparison")
        if args.which == "neumann":
            report = compare_mod.neumann_compare(f)
        else:
            report = compare_mod.dirichlet_compare(f)
    _write(_dumps(report.to_dict()) + "\n", args.out)
    return 0 if report.passed else 1


def _cmd_audit(args):
    records = compare_mod.run_audit(args.which, args.count, seed=args.seed)
    lines = [_dumps(rec) for rec in records]
    n_fail = sum(1 for rec in records if not rec["passed"])
    summary = {
        "summary": {
            "theorem": args.which,
            "count": args.count,
            "seed": args.seed,
            "failures": n_fail,
        }
    }
    lines.append(_dumps(summary))
    _write("\n".join(lines) + "\n", args.out)
    return 0 if n_fail == 0 else 1


def _cmd_gap_scan(args):
    res = gap_mod.gap_scan(args.alpha, args.grid)
    lines = ["b,gap_numeric,gap_formula"] + [
        f"{_fmt(b)},{_fmt(n)},{_fmt(f)}"
        for b, n, f in zip(res.b_values, res.gaps_numeric, res.gaps_formula)
    ]
    _write("\n".join(lines) + "\n", args.out)
    return 0


def _parse_alpha_grid(spec):
    try:
        if ":" in spec:
            lo, hi, count = spec.split(":")
            lo, hi, count = float(lo), float(hi), int(count)
            if not (0 < lo < hi and count >= 2):
                raise ValueError("need 0 < lo < hi and count >= 2")
            return list(np.geomspace(lo, hi, count))
        return [float(tok) for tok in spec.split(",") if tok]
    except ValueError as exc:
        raise CliError(f"bad alpha grid {spec!r}: {exc}") from exc


def _cmd_gap_crit(args):
    alphas = _parse_alpha_grid(args.alpha_grid)
    lines = ["alpha,b_crit"]
    for a in alphas:
        bc = gap_mod.b_crit(a)
        lines.append(f"{_fmt(a)},{'' if bc is None else _fmt(bc)}")
    _write("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_gap_search(args):
    res = gap_mod.extremal_search(args.alpha, args.cells, measure=args.measure)
    payload = {
        "alpha": args.alpha,
        "n_cells": res.n_cells,
        "measure": args.measure,
        "cells": list(res.cells),
        "gap": res.gap,
        "exhaustive": res.exhaustive,
        "source": res.source.to_dict(),
    }
    _write(_dumps(payload) + "\n", args.out)
    return 0


def _cmd_example(args):
    u, v = gap_mod.example_solutions(args.alpha)
    mn_u, _, mx_u, _ = extrema(u)
    mn_v, _, mx_v, _ = extrema(v)
    payload = {
        "alpha": args.alpha,
        "u": u.to_dict(),
        "v": v.to_dict(),
        "osc_u": mx_u - mn_u,
        "osc_v": mx_v - mn_v,
        "probe_gap_u": u(-PI / 2.0) - u(PI),
        "sup_u": lp_norm(u, math.inf),
        "sup_v": lp_norm(v, math.inf),
    }
    _write(_dumps(payload) + "\n", args.out)
    return 0


# ---------------------------------------------------------------------------
# parser

def build_parser():
    parser = argparse.ArgumentParser(
        prog="rodsym",
        description="1D Poisson solves, rearrangements, and symmetrization audits",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve -u'' = f under a boundary condition")
    p.add_argument("--bc", required=True, help="robin:<alpha>, neumann, or dirichlet")
    p.add_argument("--in", dest="infile", required=True, help="step-function JSON file")
    p.add_argument("--grid", type=int, default=1001, help="samples for CSV output")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("json", "csv"), default=None)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("rearrange", help="decreasing or symmetric rearrangement")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--mode", choices=("dec", "sym"), required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_rearrange)

    p = sub.add_parser("star", help="star function of a step source")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=_cmd_star)

    p = sub.add_parser("check", help="random audits of the rearrangement inequalities")
    p.add_argument("which", choices=("hl", "rs", "baernstein"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--grid", type=int, default=rearrange_mod.CONVOLUTION_GRID)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("compare", help="comparison-principle report for one source")
    p.add_argument("which", choices=("robin", "neumann", "dirichlet"))
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("audit", help="randomized comparison audits")
    p.add_argument("which", choices=("robin", "neumann", "dirichlet"))
    p.add_argument("--count", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_audit)

    p = sub.add_parser("gap", help="temperature-gap tools")
    gap_sub = p.add_subparsers(dest="gap_command", required=True)

    q = gap_sub.add_parser("scan", help="gap over a grid of source centers (CSV)")
    q.add_argument("--alpha", type=float, required=True)
    q.add_argument("--grid", type=int, default=gap_mod.SCAN_GRID)
    q.add_argument("--out", default=None)
    q.set_defaults(func=_cmd_gap_scan)

    q = gap_sub.add_parser("crit", help="critical centers over an alpha grid (CSV)")
    q.add_argument("--alpha-grid", required=True,
                   help="comma list (a,b,c) or lo:hi:count geometric grid")
    q.add_argument("--out", default=None)
    q.set_defaults(func=_cmd_gap_crit)

    q = gap_sub.add_parser("search", help="best union of cells for the gap (JSON)")
    q.add_argument("--alpha", type=float, required=True)
    q.add_argument("--cells", type=int, required=True)
    q.add_argument("--measure", type=float, default=PI)
    q.add_argument("--out", default=None)
    q.set_defaults(func=_cmd_gap_search)

    p = sub.add_parser("example", help="closed-form half-rod example (JSON)")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_example)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"rodsym: {exc}", file=sys.stderr)
        return 2
    except InternalError as exc:
        print(f"rodsym: internal check failed: {exc}", file=sys.stderr)
        return 1
    except RodsymError as exc:
        print(f"rodsym: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"rodsym: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
