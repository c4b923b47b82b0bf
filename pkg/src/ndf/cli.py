"""Command-line interface.

Subcommands: verify, extend, bounds, partition, flow-demo, mz-check.
Exit codes: 0 success / property holds, 1 domain-negative (not a
design, non-convergence, failed empirical check), 2 usage or format
error. With a fixed seed every command writes byte-identical output.
JSON reports echo the effective configuration so that every constant a
result depends on is auditable.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from .bounds import bounds_report, proposition1_plan
from .config import ENV_VAR, ConfigError, load_config
from .flow import (
    clamp_epsilon,
    flow_displacement_bound_check,
    integrate_flow,
    quasi_uniform_points,
    random_boundary_polynomial,
)
from .mz import mz_sweep
from .optimizer import ExtendOptions, extend_design
from .partition import cell_area, cell_diameter, equal_area_partition
from .pointset_io import PointSetFormatError, read_pointset, write_pointset
from .residual import Configuration, DesignInconsistencyError, certify_design

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


class UsageError(ValueError):
    """Command-level usage problem not caught by argparse."""


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    if v is None:
        return ""
    return str(v)


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(f"not JSON serializable: {type(o)}")


def _flatten(obj, prefix="") -> list[tuple[str, str]]:
    rows = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            rows.extend(_flatten(v, f"{prefix}{k}." if prefix else f"{k}."))
        return rows
    key = prefix[:-1]
    if isinstance(obj, (list, tuple)):
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return [(key, " ".join(_fmt(v) for v in obj))]
        return [(key, json.dumps(obj, default=_json_default))]
    return [(key, _fmt(obj))]


def _render_kv(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2, sort_keys=True,
                          default=_json_default) + "\n"
    pairs = _flatten(payload)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        w.writerows(pairs)
        return buf.getvalue()
    width = max((len(k) for k, _ in pairs), default=0)
    return "".join(f"{k.ljust(width)}  {v}\n" for k, v in pairs)


def _render_rows(header: list[str], rows: list[list], fmt: str,
                 payload_extra: dict | None = None) -> str:
    if fmt == "json":
        payload = dict(payload_extra or {})
        payload["rows"] = [dict(zip(header, r)) for r in rows]
        return json.dumps(payload, indent=2, sort_keys=True,
                          default=_json_default) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
        return buf.getvalue()
    cells = [header] + [[_fmt(v) for v in r] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip()
             for row in cells]
    out = "\n".join(lines) + "\n"
    for k, v in (payload_extra or {}).items():
        out += f"{k}: {_fmt(v) if not isinstance(v, dict) else json.dumps(v, default=_json_default)}\n"
    return out


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_verify(args) -> int:
    run = load_config(args.config)
    data = read_pointset(args.file)
    t = args.degree if args.degree is not None else data.degree
    if t is None:
        raise UsageError("no --degree given and the file header has none")
    tol = args.tol if args.tol is not None else run.design_tol
    cert = certify_design(t, Configuration(d=data.d, fixed=data.points), tol)
    payload = {
        "command": "verify",
        "file": args.file,
        "max_norm_correction": data.max_correction,
        "certificate": cert.to_dict(),
        "config": run.to_dict(),
    }
    _emit(_render_kv(payload, args.format), args.out)
    return EXIT_OK if cert.is_design else EXIT_DOMAIN


def cmd_extend(args) -> int:
    run = load_config(args.config)
    data = read_pointset(args.fixed_file)
    seed = args.seed if args.seed is not None else run.seed
    opts = ExtendOptions(
        init_strategy=args.init if args.init else run.init,
        max_iters=args.max_iters if args.max_iters else run.max_iters,
        step_tol=run.gradient_tol,
        residual_tol=args.tol if args.tol is not None else run.design_tol,
        restarts=args.restarts if args.restarts else run.restarts,
        line_search=run.line_search,
        seed=seed,
        constants=run.constants(),
    )
    n = None if args.auto_n else args.n
    result = extend_design(args.degree, data.points, n, opts, d=data.d)
    union = (np.vstack([data.points, result.free_points])
             if data.points.size else result.free_points)

    prefix = args.out
    free_path = f"{prefix}_free.pts"
    union_path = f"{prefix}_union.pts"
    json_path = f"{prefix}_result.json"
    write_pointset(free_path, result.free_points)
    write_pointset(union_path, union,
                   degree=args.degree if result.converged else None)
    payload = {
        "command": "extend",
        "fixed_file": args.fixed_file,
        "t": args.degree,
        "n_free": int(result.free_points.shape[0]),
        "n_fixed": int(data.points.shape[0]),
        "auto_n": bool(args.auto_n),
        "converged": result.converged,
        "iterations_used": result.iterations_used,
        "restarts_used": result.restarts_used,
        "warnings": result.warnings,
        "certificate": result.certificate.to_dict(),
        "files": {"free": free_path, "union": union_path,
                  "result": json_path},
        "config": run.to_dict(),
    }
    with open(json_path, "w") as fh:
        fh.write(json.dumps(payload, indent=2, sort_keys=True,
                            default=_json_default) + "\n")
    if args.trace:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["phase", "iteration", "objective", "gradient_norm",
                    "step"])
        for row in result.trace:
            w.writerow([_fmt(v) for v in row])
        with open(args.trace, "w") as fh:
            fh.write(buf.getvalue())
    sys.stdout.write(_render_kv(payload, args.format))
    return EXIT_OK if result.converged else EXIT_DOMAIN


def cmd_bounds(args) -> int:
    run = load_config(args.config)
    report = bounds_report(args.degree, args.t1, args.m, args.dim,
                           run.constants())
    payload = {"command": "bounds", "report": report.to_dict(),
               "config": run.to_dict()}
    if args.t1 is not None:
        plan = proposition1_plan(args.t1, args.degree, args.dim)
        payload["replication_plan"] = {
            "p": plan.p, "q": plan.q, "copies": plan.copies,
            "unit_size": plan.unit_size_expr,
            "constant": plan.constant_expr,
        }
    _emit(_render_kv(payload, args.format), args.out)
    return EXIT_OK


def cmd_partition(args) -> int:
    part = equal_area_partition(args.n)
    header = ["kind", "theta0", "theta1", "phi0", "phi1", "area",
              "diameter"]
    rows = [[c.kind, c.theta0, c.theta1, c.phi0, c.phi1, cell_area(c),
             cell_diameter(c)] for c in part.cells]
    rows.append(["norm", None, None, None, None, None, part.norm])
    text = _render_rows(header, rows, args.format,
                        payload_extra={"n": args.n, "norm": part.norm})
    _emit(text, args.out)
    return EXIT_OK


def cmd_flow_demo(args) -> int:
    run = load_config(args.config)
    seed = args.seed if args.seed is not None else run.seed
    steps = args.steps if args.steps else run.flow_steps
    t, d = args.degree, args.dim
    P = random_boundary_polynomial(t, d, seed,
                                   quad_order=2 * t + run.quad_pad)
    starts = quasi_uniform_points(args.n_starts, d, seed=seed)
    trace = integrate_flow(P, starts, r_d=run.r_d, steps=steps)
    diffs = np.diff(trace.mean_values)
    monotone_ok = bool((diffs >= -1e-12).all())
    displacement_ok, excess = flow_displacement_bound_check(trace, starts)
    header = ["step", "time", "mean_value"]
    rows = [[i, trace.times[i], trace.mean_values[i]]
            for i in range(len(trace.times))]
    extra = {
        "t": t, "d": d, "seed": seed, "steps": steps,
        "epsilon": clamp_epsilon(d),
        "terminal_time": trace.terminal_time,
        "monotone_ok": monotone_ok,
        "displacement_ok": bool(displacement_ok),
        "displacement_excess": float(excess),
    }
    if args.format == "json":
        extra["config"] = run.to_dict()
    text = _render_rows(header, rows, args.format, payload_extra=extra)
    _emit(text, args.out)
    return EXIT_OK if monotone_ok and displacement_ok else EXIT_DOMAIN


def cmd_mz_check(args) -> int:
    run = load_config(args.config)
    seed = args.seed if args.seed is not None else run.seed
    reports = mz_sweep(args.n, args.cases, max_degree=args.max_degree,
                       seed=seed, r_d=run.r_d, quad_pad=run.quad_pad)
    dicts = [r.to_dict() for r in reports]
    header = list(dicts[0].keys())
    rows = [[rd[k] for k in header] for rd in dicts]
    unexplained = sum(1 for r in reports
                      if not r.passed and r.hypothesis_ok)
    extra = {
        "n_cells": args.n, "cases": args.cases, "seed": seed,
        "passed": sum(1 for r in reports if r.passed),
        "total": len(reports),
        "unexplained_failures": unexplained,
    }
    if args.format == "json":
        extra["config"] = run.to_dict()
    text = _render_rows(header, rows, args.format, payload_extra=extra)
    _emit(text, args.out)
    return EXIT_OK if unexplained == 0 else EXIT_DOMAIN


def _add_common(p, fmt_default) -> None:
    p.add_argument("--config", help=f"JSON config path (fallback: ${ENV_VAR})")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "table", "csv"),
                   default=fmt_default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ndf",
        description="Construct, extend, and certify nested spherical "
                    "t-designs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="certify a point-set file")
    p.add_argument("file")
    p.add_argument("--degree", "-t", type=int,
                   help="design strength to test (default: file header)")
    p.add_argument("--tol", type=float)
    _add_common(p, "json")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("extend",
                       help="add free points until the union is a t-design")
    p.add_argument("fixed_file")
    p.add_argument("--degree", "-t", type=int, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--n", type=int, help="number of free points")
    g.add_argument("--auto-n", action="store_true",
                   help="take N from the sufficient-count formula")
    p.add_argument("--tol", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--init", choices=("auto", "equal_area_centers",
                                      "spiral", "random"))
    p.add_argument("--max-iters", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--trace", help="per-iteration CSV trace path")
    p.add_argument("--config",
                   help=f"JSON config path (fallback: ${ENV_VAR})")
    p.add_argument("--out", required=True,
                   help="output prefix for _free.pts/_union.pts/_result.json")
    p.add_argument("--format", choices=("json", "table", "csv"),
                   default="json")
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("bounds", help="evaluate the point-count bounds")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--degree", "-t", type=int, required=True)
    p.add_argument("--t1", type=int)
    p.add_argument("--m", type=int, default=0,
                   help="fixed point count entering the bounds")
    _add_common(p, "json")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("partition",
                       help="area-regular partition of the 2-sphere")
    p.add_argument("--n", type=int, required=True)
    _add_common(p, "csv")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("flow-demo",
                       help="gradient-flow trace for a random boundary "
                            "polynomial")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--degree", "-t", type=int, default=3)
    p.add_argument("--seed", type=int)
    p.add_argument("--steps", type=int)
    p.add_argument("--n-starts", type=int, default=32)
    _add_common(p, "csv")
    p.set_defaults(func=cmd_flow_demo)

    p = sub.add_parser("mz-check",
                       help="random sweep of the discretization checks")
    p.add_argument("--n", type=int, default=4000,
                   help="partition cell count")
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--max-degree", type=int, default=4)
    p.add_argument("--seed", type=int)
    _add_common(p, "csv")
    p.set_defaults(func=cmd_mz_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PointSetFormatError, ConfigError, UsageError,
            DesignInconsistencyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
