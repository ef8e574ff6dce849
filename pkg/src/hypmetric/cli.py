"""Command-line front end.

    hypmetric fixedpoint --mode banach --map "affine:0.5,1,0.3333333333,1" --start 0,0
    hypmetric check-metric --metric canonical --samples 10000 --seed 42
    hypmetric demo ball --center 0,0 --radius 1,2
    hypmetric demo evt --grid 0,1,1001

Reports are JSON on stdout (or ``--out``); ``demo ball`` can also emit CSV.
Exit status: 0 success, 1 usage or parse error, 2 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import time

import numpy as np

from . import dmetric, fixedpoint, funcspace
from .errors import (
    GridTooCoarse,
    HypMetricError,
    InvalidRadius,
    InvalidReal,
    NoConvergence,
    NotAContraction,
    NotContractive,
    NotSelfMap,
    PowerFixedPointMismatch,
)
from .hypnum import BC, Hyp

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 by default; 2 is reserved for numeric failures here.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# JSON output


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite float {x!r}")
    s = format(x, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or isinstance(obj, bool):
        return {None: "null", True: "true", False: "false"}[obj]
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        import json
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}{dumps(v, indent, _level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def hyp_json(x: Hyp, canonical: bool = False) -> dict:
    out = {"u": x.u, "v": x.v}
    if canonical:
        a1, a2 = x.canonical
        out["a1"] = a1
        out["a2"] = a2
    return out


def _point_json(p, canonical):
    if isinstance(p, Hyp):
        return hyp_json(p, canonical)
    if isinstance(p, BC):
        return {"z1": [p.z1.real, p.z1.imag], "z2": [p.z2.real, p.z2.imag]}
    return p


# argument parsing helpers


def _floats(text: str, n: int, what: str) -> list:
    parts = text.split(",")
    if len(parts) != n:
        raise UsageError(f"{what} expects {n} comma-separated numbers, got {text!r}")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"{what}: cannot parse {text!r}") from None
    if not all(math.isfinite(v) for v in vals):
        raise UsageError(f"{what}: values must be finite")
    return vals


def parse_hyp(text: str, what: str = "value") -> Hyp:
    u, v = _floats(text, 2, what)
    return Hyp(u, v)


def parse_tol(text: str) -> Hyp:
    parts = text.split(",")
    if len(parts) == 1:
        (t,) = _floats(text, 1, "--tol")
        return Hyp(t, t)
    return parse_hyp(text, "--tol")


def parse_grid(text: str) -> fixedpoint.Grid:
    lo, hi, n = _floats(text, 3, "--grid")
    if n != int(n) or n < 2:
        raise UsageError("--grid point count must be an integer >= 2")
    if not lo < hi:
        raise UsageError("--grid needs lo < hi")
    return fixedpoint.Grid(lo, hi, int(n))


# map mini-language


def affine_map(su, ou, sv, ov) -> fixedpoint.MapSpec:
    def fn(x):
        return Hyp(su * x.u + ou, sv * x.v + ov)

    def vec(p):
        return np.column_stack([su * p[:, 0] + ou, sv * p[:, 1] + ov])

    return fixedpoint.MapSpec(fn, Hyp(abs(su), abs(sv)), f"affine:{su},{ou},{sv},{ov}", vec)


def _clamp_step_scalar(t):
    return 4.0 + 2.0 * min(max(t, 0.0), 1.0)


def clamp_step_map() -> fixedpoint.MapSpec:
    """``4 + 2*clamp(t, 0, 1)`` per slot: Lipschitz 2, but its square is constant."""
    def fn(x):
        return Hyp(_clamp_step_scalar(x.u), _clamp_step_scalar(x.v))

    def vec(p):
        return 4.0 + 2.0 * np.clip(p, 0.0, 1.0)

    return fixedpoint.MapSpec(fn, Hyp(2.0, 2.0), "clamp-step", vec)


def quad_contractive_map() -> fixedpoint.MapSpec:
    """``t - t**2/2`` per slot: contractive on [0, 1] but not a contraction."""
    def fn(x):
        return Hyp(x.u - x.u * x.u / 2.0, x.v - x.v * x.v / 2.0)

    def vec(p):
        return p - p * p / 2.0

    return fixedpoint.MapSpec(fn, None, "quad-contractive", vec)


def evt_counterexample_map() -> fixedpoint.MapSpec:
    """``z -> z1*e1 + (1 - z1)*e2``."""
    def fn(x):
        return Hyp(x.u, 1.0 - x.u)

    def vec(p):
        return np.column_stack([p[:, 0], 1.0 - p[:, 0]])

    return fixedpoint.MapSpec(fn, None, "evt-counterexample", vec)


BUILTIN_MAPS = {
    "clamp-step": clamp_step_map,
    "quad-contractive": quad_contractive_map,
    "evt-counterexample": evt_counterexample_map,
}


def parse_map(text: str) -> fixedpoint.MapSpec:
    if text in BUILTIN_MAPS:
        return BUILTIN_MAPS[text]()
    if text.startswith("affine:"):
        su, ou, sv, ov = _floats(text[len("affine:"):], 4, "affine map")
        return affine_map(su, ou, sv, ov)
    raise UsageError(f"unknown map {text!r}; expected affine:su,ou,sv,ov or one of "
                     f"{', '.join(BUILTIN_MAPS)}")


def parse_metric(text: str) -> dmetric.DMetric:
    if text == "canonical":
        return dmetric.CANONICAL
    if text == "hypmod":
        return dmetric.HYPMOD
    if text.startswith("product:"):
        names = text[len("product:"):].split(",")
        if len(names) != 2 or not all(n in dmetric.REAL_METRICS for n in names):
            raise UsageError(f"product metric expects two of {sorted(dmetric.REAL_METRICS)}, got {text!r}")
        return dmetric.product_metric(dmetric.REAL_METRICS[names[0]],
                                      dmetric.REAL_METRICS[names[1]], text)
    raise UsageError(f"unknown metric {text!r}")


def resolve_seed(seed):
    if seed is not None:
        return seed
    env = os.environ.get("DMETRIC_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"DMETRIC_SEED must be an integer, got {env!r}") from None
    return 0


# commands


def _report_json(rep: fixedpoint.ContractionReport, canonical: bool) -> dict:
    out = {
        "fixed_point": _point_json(rep.fixed_point, canonical),
        "iterations": rep.iterations,
        "residual": hyp_json(rep.residual, canonical),
        "converged": rep.converged,
    }
    if rep.k is not None:
        out["k"] = hyp_json(rep.k, canonical)
    out["apriori_bound"] = [hyp_json(b, canonical) for b in rep.apriori_bounds]
    if rep.errors is not None:
        out["reference"] = _point_json(rep.reference, canonical)
        out["final_error"] = hyp_json(rep.errors[-1], canonical)
    if rep.grid_bound is not None:
        out["grid_minimizer"] = _point_json(rep.grid_minimizer, canonical)
        out["grid_bound"] = hyp_json(rep.grid_bound, canonical)
        out["probe_steps"] = len(rep.probe_distances) - 1
    if rep.power != 1:
        out["power"] = rep.power
    return out


def cmd_fixedpoint(args) -> tuple[dict, int]:
    T = parse_map(args.map)
    x0 = parse_hyp(args.start, "--start")
    tol = parse_tol(args.tol)
    seed = resolve_seed(args.seed)
    d = dmetric.CANONICAL
    inputs = {"mode": args.mode, "map": args.map, "start": hyp_json(x0), "tol": hyp_json(tol),
              "max_iter": args.max_iter, "seed": seed}
    if args.mode == "banach":
        rep = fixedpoint.solve_banach(T, x0, d, tol, args.max_iter)
    elif args.mode == "inexact":
        def sched(n):
            return Hyp(n ** -2.0, n ** -2.0)
        step = fixedpoint.boundary_step if args.perturb == "boundary" else fixedpoint.exact_step
        inputs["perturb"] = args.perturb
        rep = fixedpoint.solve_inexact(T, x0, sched, d, args.max_iter, step, stop_below=tol)
        if not rep.converged:
            raise NoConvergence(f"inexact iterates did not get within {tol!r} of the fixed point", rep)
    elif args.mode == "power":
        inputs["n"] = args.n
        pairs = None
        if not args.map.startswith("affine:"):
            rng = np.random.default_rng(seed)
            pts = rng.uniform(-10.0, 10.0, size=(512, 2))
            pairs = [(Hyp(*pts[2 * i]), Hyp(*pts[2 * i + 1])) for i in range(256)]
        rep = fixedpoint.solve_power(T, args.n, x0, d, tol, args.max_iter, pairs=pairs)
    else:
        grid = parse_grid(args.grid)
        inputs["grid"] = {"lo": grid.lo, "hi": grid.hi, "n": grid.n}
        rep = fixedpoint.solve_contractive_compact(T, grid, d, args.max_iter, seed=seed)
    return {"command": "fixedpoint", "inputs": inputs,
            "outputs": _report_json(rep, args.canonical)}, EXIT_OK


def _random_points(metric_name: str, n: int, rng) -> list:
    if metric_name == "canonical":
        c = rng.uniform(-100.0, 100.0, size=(n, 2))
        return [Hyp(u, v) for u, v in c]
    c = rng.uniform(-100.0, 100.0, size=(n, 4))
    return [BC(complex(a, b), complex(e, f)) for a, b, e, f in c]


def cmd_check_metric(args) -> tuple[dict, int]:
    d = parse_metric(args.metric)
    if args.samples < 3:
        raise UsageError(f"--samples must be at least 3, got {args.samples}")
    seed = resolve_seed(args.seed)
    rng = np.random.default_rng(seed)
    pts = _random_points(args.metric, args.samples, rng)
    idx = rng.integers(0, len(pts), size=(args.samples, 3))
    triples = [(pts[i], pts[j], pts[k]) for i, j, k in idx]
    rep = dmetric.check_axioms(d, pts, triples=triples, slack_ulps=args.slack_ulps)

    def clause(name, ok):
        ce = rep.counterexamples.get(name)
        if ce is not None:
            ce = {k: _point_json(v, args.canonical) for k, v in ce.items()}
        return {"pass": ok, "counterexample": ce}

    outputs = {
        "identity": clause("identity", rep.identity_ok),
        "symmetry": clause("symmetry", rep.symmetry_ok),
        "triangle": clause("triangle", rep.triangle_ok),
        "points": rep.n_points,
        "pairs": rep.n_pairs,
        "triples": rep.n_triples,
        "all_pass": rep.passed,
    }
    inputs = {"metric": args.metric, "samples": args.samples, "seed": seed,
              "slack_ulps": args.slack_ulps}
    return ({"command": "check-metric", "inputs": inputs, "outputs": outputs},
            EXIT_OK if rep.passed else EXIT_NUMERIC)


def cmd_demo(args) -> tuple[dict, int]:
    c = args.canonical
    if args.demo == "ball":
        center = parse_hyp(args.center, "--center")
        r = parse_hyp(args.radius, "--radius")
        verts = dmetric.sphere_vertices(center, r)
        w = dmetric.boundary_witness(center, r)
        d = dmetric.CANONICAL

        def member(kind, x):
            return dmetric.ball_membership(dmetric.DBall(center, r, kind), d, x)

        outputs = {
            "vertices": [hyp_json(v, c) for v in verts],
            "square": dmetric.square_bounds(center, r),
            "witness": hyp_json(w, c),
            "witness_in_closed": member("closed", w),
            "witness_in_open": member("open", w),
            "witness_on_sphere": member("sphere", w),
            "vertices_on_sphere": [member("sphere", v) for v in verts],
        }
        inputs = {"center": hyp_json(center, c), "radius": hyp_json(r, c)}
    else:
        grid = parse_grid(args.grid)
        pts = grid.points()
        f = funcspace.SampledFunction.sample(evt_counterexample_map().vec, pts, grid.h,
                                             vectorized=True)
        rep = funcspace.evt_extrema(f)
        outputs = {
            "M": hyp_json(rep.M, c),
            "m": hyp_json(rep.m, c),
            "attainers": {k: hyp_json(v, c) for k, v in rep.attainers.items()},
            "sup_attained": rep.sup_attained,
            "inf_attained": rep.inf_attained,
            "jointly_attained": rep.jointly_attained,
        }
        inputs = {"grid": {"lo": grid.lo, "hi": grid.hi, "n": grid.n}}
    return {"command": f"demo {args.demo}", "inputs": inputs, "outputs": outputs}, EXIT_OK


def _ball_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "u", "v"])
    for v in report["outputs"]["vertices"]:
        w.writerow(["vertex", _fmt_float(v["u"]), _fmt_float(v["v"])])
    sq = report["outputs"]["square"]
    for u, v in ((sq["u_max"], sq["v_max"]), (sq["u_max"], sq["v_min"]),
                 (sq["u_min"], sq["v_max"]), (sq["u_min"], sq["v_min"])):
        w.writerow(["corner", _fmt_float(u), _fmt_float(v)])
    wt = report["outputs"]["witness"]
    w.writerow(["witness", _fmt_float(wt["u"]), _fmt_float(wt["v"])])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hypmetric", description="Hyperbolic-valued metric space toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--seed", type=int, default=None,
                        help="random seed (falls back to $DMETRIC_SEED, then 0)")
        sp.add_argument("--canonical", action="store_true",
                        help="also emit a1, a2 for every hyperbolic value")
        sp.add_argument("--out", default=None, help="write the report here instead of stdout")
        sp.add_argument("--timing", action="store_true",
                        help="add wall_time_s to the report (breaks byte-identical output)")

    fp = sub.add_parser("fixedpoint", help="run a fixed-point solver")
    fp.add_argument("--mode", choices=["banach", "inexact", "power", "contractive"], default="banach")
    fp.add_argument("--map", required=True)
    fp.add_argument("--start", default="0,0")
    fp.add_argument("--tol", default="1e-10")
    fp.add_argument("--max-iter", type=int, default=10_000)
    fp.add_argument("--n", type=int, default=1, help="power N for --mode power")
    fp.add_argument("--grid", default="0,1,1001", help="lo,hi,points-per-axis for --mode contractive")
    fp.add_argument("--perturb", choices=["boundary", "exact"], default="boundary",
                    help="step perturbation for --mode inexact")
    common(fp)

    cm = sub.add_parser("check-metric", help="property-check the metric axioms")
    cm.add_argument("--metric", required=True)
    cm.add_argument("--samples", type=int, default=10_000)
    cm.add_argument("--slack-ulps", type=int, default=4)
    common(cm)

    dm = sub.add_parser("demo", help="ball geometry or extreme-value demos")
    dm.add_argument("demo", choices=["ball", "evt"])
    dm.add_argument("--center", default="0,0")
    dm.add_argument("--radius", default="1,1")
    dm.add_argument("--grid", default="0,1,1001")
    dm.add_argument("--format", choices=["json", "csv"], default="json")
    common(dm)
    return p


COMMANDS = {"fixedpoint": cmd_fixedpoint, "check-metric": cmd_check_metric, "demo": cmd_demo}

_NUMERIC = (NotAContraction, NoConvergence, PowerFixedPointMismatch, NotContractive,
            GridTooCoarse, NotSelfMap)


def _emit(text: str, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    t0 = time.perf_counter()
    try:
        report, code = COMMANDS[args.command](args)
    except UsageError as e:
        print(f"hypmetric: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidRadius, InvalidReal) as e:
        print(f"hypmetric: error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except _NUMERIC as e:
        print(f"hypmetric: {type(e).__name__}: {e}", file=sys.stderr)
        report = {"command": args.command, "error": type(e).__name__, "message": str(e)}
        partial = getattr(e, "report", None)
        if partial is not None:
            report["partial"] = _report_json(partial, args.canonical)
        _emit(dumps(report) + "\n", args.out)
        return EXIT_NUMERIC
    except HypMetricError as e:
        print(f"hypmetric: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.timing:
        report["wall_time_s"] = time.perf_counter() - t0
    if args.command == "demo" and args.demo == "ball" and args.format == "csv":
        _emit(_ball_csv(report), args.out)
    else:
        _emit(dumps(report) + "\n", args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
