"""Command-line front end: ``eval``, ``sweep``, ``compare`` and ``bench``.

Exit codes: 0 when everything converged, 1 for usage or domain errors,
2 when any evaluation failed to converge.
"""

from __future__ import annotations

import argparse
import csv
import json
import statistics
import sys
import time
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import ilt, kvcore, literature
from .kvcore import DimensionlessCoord, DomainError, MaterialParams
from .quadrature import QuadSpec

EXIT_OK, EXIT_USAGE, EXIT_NO_CONVERGE = 0, 1, 2

CSV_HEADER = ["xi", "tau", "method", "value", "error_estimate", "function_evals", "status"]

# Ranges of the published figures; sweeps default to them.
DEFAULT_RANGE = {"tau": (0.05, 5.0), "xi": (0.01, 4.0)}
DEFAULT_POINTS = 100


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Record:
    """One method evaluated at one point.  ``error_estimate`` is None for closed forms."""

    value: float
    error_estimate: Optional[float]
    function_evals: int
    converged: bool


def _fmt(x: float) -> str:
    return "{:.16e}".format(x)


def _closed(fn: Callable[[DimensionlessCoord], float]):
    def run(c, spec, cfg):
        return Record(float(fn(c)), None, 0, True)
    return run


def _from_outcome(fn):
    def run(c, spec, cfg):
        res = fn(c, spec)
        return Record(res.value, res.error_estimate, res.function_evals, res.converged)
    return run


def _ilt_run(image_fn):
    def run(c, spec, cfg):
        res = ilt.invert(image_fn(c.xi), c.tau, cfg)
        return Record(res.value, res.error_estimate, res.function_evals, res.converged)
    return run


METHODS = {
    "step": {
        "integral": _from_outcome(kvcore.step_response),
        "ilt": _ilt_run(ilt.step_image),
        "asym-small-tau": _closed(kvcore.step_asym_small_tau),
        "asym-large-tau": _closed(kvcore.step_asym_large_tau),
        "asym-small-xi": _closed(kvcore.step_asym_small_xi),
        "morrison": _from_outcome(literature.morrison_step),
    },
    "delta": {
        "integral": _from_outcome(kvcore.delta_response),
        "ilt": _ilt_run(ilt.delta_image),
        "asym-small-tau": _closed(kvcore.delta_asym_small_tau),
        "asym-large-tau": _closed(kvcore.delta_asym_large_tau),
        "asym-small-xi": _closed(kvcore.delta_asym_small_xi),
        "hanin": _from_outcome(literature.hanin_delta),
        "dozio": _from_outcome(literature.dozio_delta),
    },
}
ALL_METHODS = ("integral", "ilt", "asym-small-tau", "asym-large-tau", "asym-small-xi",
               "hanin", "morrison", "dozio")


def evaluate(pulse: str, method: str, c: DimensionlessCoord, spec: QuadSpec,
             cfg: ilt.IltConfig) -> Record:
    """Evaluate one method.  Refusals (ILT guard, literature domain) raise DomainError."""
    try:
        return METHODS[pulse][method](c, spec, cfg)
    except ilt.IltRefusal as exc:
        raise DomainError(str(exc)) from exc


def timed(pulse, method, c, spec, cfg):
    t0 = time.perf_counter()
    rec = evaluate(pulse, method, c, spec, cfg)
    return rec, 1e3 * (time.perf_counter() - t0)


# --------------------------------------------------------------------------
# sweep specification

@dataclass(frozen=True)
class SweepSpec:
    pulse: str
    fixed_axis: str
    fixed_value: float
    var_from: float
    var_to: float
    points: int
    spacing: str = "linear"
    methods: tuple[str, ...] = ("integral", "ilt")

    def __post_init__(self):
        if self.pulse not in METHODS:
            raise UsageError(f"unknown pulse {self.pulse!r}")
        if self.fixed_axis not in ("xi", "tau"):
            raise UsageError("fixed axis must be xi or tau")
        if not self.var_from < self.var_to:
            raise UsageError("--from must be below --to")
        if self.points < 2:
            raise UsageError("--points must be >= 2")
        if self.spacing not in ("linear", "log"):
            raise UsageError("--spacing must be linear or log")
        if self.spacing == "log" and not self.var_from > 0:
            raise UsageError("log spacing needs --from > 0")
        if self.fixed_axis == "xi":
            xi_ok, tau_ok = self.fixed_value >= 0, self.var_from > 0
        else:
            xi_ok, tau_ok = self.var_from >= 0, self.fixed_value > 0
        if not xi_ok:
            raise UsageError("xi must be >= 0")
        if not tau_ok:
            raise UsageError("tau must be > 0")
        check_methods(self.pulse, self.methods)

    def grid(self) -> list[DimensionlessCoord]:
        if self.spacing == "log":
            var = np.geomspace(self.var_from, self.var_to, self.points)
        else:
            var = np.linspace(self.var_from, self.var_to, self.points)
        if self.fixed_axis == "xi":
            return [DimensionlessCoord(self.fixed_value, float(v)) for v in var]
        return [DimensionlessCoord(float(v), self.fixed_value) for v in var]


def check_methods(pulse: str, methods: Sequence[str]):
    for m in methods:
        if m not in ALL_METHODS:
            raise UsageError(f"unknown method {m!r}")
        if m not in METHODS[pulse]:
            raise UsageError(f"method {m!r} is not available for the {pulse} pulse")


def run_sweep(spec: SweepSpec, quad: QuadSpec, cfg: ilt.IltConfig):
    """Rows ``(c, method, Record or None)`` in grid-major, then method order."""
    rows = []
    for c in spec.grid():
        for m in spec.methods:
            try:
                rec = evaluate(spec.pulse, m, c, quad, cfg)
            except DomainError as exc:
                print(f"warning: {m} at xi={c.xi}, tau={c.tau}: {exc}", file=sys.stderr)
                rec = None
            rows.append((c, m, rec))
    return rows


def write_csv(rows, stream):
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for c, m, rec in rows:
        ok = rec is not None and rec.converged
        if ok:
            err = "" if rec.error_estimate is None else _fmt(rec.error_estimate)
            w.writerow([_fmt(c.xi), _fmt(c.tau), m, _fmt(rec.value), err,
                        rec.function_evals, "ok"])
        else:
            evals = 0 if rec is None else rec.function_evals
            w.writerow([_fmt(c.xi), _fmt(c.tau), m, "", "", evals, "no_converge"])


def compare_report(spec: SweepSpec, quad: QuadSpec, cfg: ilt.IltConfig):
    """Build the comparison report for exactly two methods; returns (report, all_ok)."""
    a, b = spec.methods
    grid = []
    wall = {a: 0.0, b: 0.0}
    all_ok = True
    best = (-1.0, None)
    for c in spec.grid():
        vals = {}
        for m in (a, b):
            try:
                rec, ms = timed(spec.pulse, m, c, quad, cfg)
                wall[m] += ms
                vals[m] = rec.value if rec.converged else None
            except DomainError as exc:
                print(f"warning: {m} at xi={c.xi}, tau={c.tau}: {exc}", file=sys.stderr)
                vals[m] = None
            all_ok = all_ok and vals[m] is not None
        diff = None
        if vals[a] is not None and vals[b] is not None:
            diff = abs(vals[a] - vals[b])
            if diff > best[0]:
                best = (diff, c)
        grid.append({"xi": c.xi, "tau": c.tau, "a": vals[a], "b": vals[b], "abs_diff": diff})
    report = {
        "pulse": spec.pulse,
        "method_a": a,
        "method_b": b,
        "grid": grid,
        "max_abs_discrepancy": best[0] if best[1] is not None else None,
        "argmax": None if best[1] is None else {"xi": best[1].xi, "tau": best[1].tau},
        "wall_time_ms": {"a": wall[a], "b": wall[b]},
    }
    return report, all_ok


def bench_report(pulse: str, grid: Sequence[DimensionlessCoord], methods: Sequence[str],
                 repeats: int, quad: QuadSpec, cfg: ilt.IltConfig):
    """Median wall time and evaluation count per method per point."""
    if repeats < 3:
        raise UsageError("--repeats must be >= 3")
    points = []
    all_ok = True
    for c in grid:
        entry = {"xi": c.xi, "tau": c.tau, "results": {}}
        for m in methods:
            times = []
            rec = None
            try:
                for _ in range(repeats):
                    rec, ms = timed(pulse, m, c, quad, cfg)
                    times.append(ms)
                status = "ok" if rec.converged else "no_converge"
            except DomainError:
                status = "refused"
            all_ok = all_ok and status == "ok"
            entry["results"][m] = {
                "median_ms": statistics.median(times) if times else None,
                "samples_ms": times,
                "function_evals": None if rec is None else rec.function_evals,
                "status": status,
            }
        points.append(entry)
    return {"pulse": pulse, "repeats": repeats, "methods": list(methods),
            "points": points}, all_ok


# --------------------------------------------------------------------------
# argument handling

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _methods(text: str) -> tuple[str, ...]:
    return tuple(m.strip() for m in text.split(",") if m.strip())


def _fix(text: str) -> tuple[str, float]:
    axis, sep, val = text.partition("=")
    if not sep or axis not in ("xi", "tau"):
        raise argparse.ArgumentTypeError("--fix takes xi=VALUE or tau=VALUE")
    try:
        return axis, float(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad value in --fix {text!r}")


def _material(text: str) -> MaterialParams:
    vals = _floats(text)
    if len(vals) != 3:
        raise argparse.ArgumentTypeError("--material takes rho,Ge,t_eps")
    try:
        return MaterialParams(*vals)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _add_numerics(p):
    p.add_argument("--pulse", choices=("step", "delta"), required=True)
    p.add_argument("--rel-tol", type=float, default=kvcore.DEFAULT_QUAD.rel_tol)
    p.add_argument("--abs-tol", type=float, default=kvcore.DEFAULT_QUAD.abs_tol)
    p.add_argument("--ilt-nodes", type=int, default=ilt.IltConfig().node_count)


def _add_sweep(p, methods_default):
    p.add_argument("--fix", type=_fix, default=("xi", 0.5),
                   help="fixed coordinate, xi=VALUE or tau=VALUE (default xi=0.5)")
    p.add_argument("--from", dest="var_from", type=float, default=None)
    p.add_argument("--to", dest="var_to", type=float, default=None)
    p.add_argument("--points", type=int, default=DEFAULT_POINTS)
    p.add_argument("--spacing", choices=("linear", "log"), default="linear")
    p.add_argument("--methods", type=_methods, default=methods_default)
    p.add_argument("--out", default=None, help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kvwave", description="Transient response of a semi-infinite Kelvin-Voigt medium.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="evaluate one method at one point")
    _add_numerics(p)
    p.add_argument("--xi", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--x", type=float, help="distance in m (with --material)")
    p.add_argument("--t", type=float, help="time in s (with --material)")
    p.add_argument("--material", type=_material, help="rho,Ge,t_eps")
    p.add_argument("--method", default="integral")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("sweep", help="tabulate methods along a line, as CSV")
    _add_numerics(p)
    _add_sweep(p, ("integral", "ilt"))
    p.add_argument("--format", choices=("csv",), default="csv")

    p = sub.add_parser("compare", help="max discrepancy between two methods, as JSON")
    _add_numerics(p)
    _add_sweep(p, ("integral", "ilt"))
    p.add_argument("--format", choices=("json",), default="json")

    p = sub.add_parser("bench", help="median timings per method and point, as JSON")
    _add_numerics(p)
    _add_sweep(p, ("integral", "ilt"))
    p.add_argument("--xi", type=_floats, default=None,
                   help="comma list; with --tau forms a product grid instead of a sweep")
    p.add_argument("--tau", type=_floats, default=None)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--format", choices=("json",), default="json")
    return parser


def _numerics(args):
    try:
        quad = QuadSpec(rel_tol=args.rel_tol, abs_tol=args.abs_tol,
                        max_subdivisions=kvcore.DEFAULT_QUAD.max_subdivisions,
                        tail_tol_fraction=kvcore.DEFAULT_QUAD.tail_tol_fraction)
        cfg = ilt.IltConfig(node_count=args.ilt_nodes)
    except ValueError as exc:
        raise UsageError(str(exc))
    return quad, cfg


def _sweep_spec(args) -> SweepSpec:
    axis, value = args.fix
    varying = "tau" if axis == "xi" else "xi"
    lo, hi = DEFAULT_RANGE[varying]
    return SweepSpec(
        pulse=args.pulse, fixed_axis=axis, fixed_value=value,
        var_from=lo if args.var_from is None else args.var_from,
        var_to=hi if args.var_to is None else args.var_to,
        points=args.points, spacing=args.spacing, methods=tuple(args.methods))


def _emit(text: str, path: Optional[str]):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _cmd_eval(args, quad, cfg) -> int:
    check_methods(args.pulse, [args.method])
    if args.material is not None:
        if args.x is None or args.t is None:
            raise UsageError("--material needs --x and --t")
        c = kvcore.to_dimensionless(args.x, args.t, args.material)
    else:
        if args.xi is None or args.tau is None:
            raise UsageError("need --xi and --tau (or --material with --x and --t)")
        c = DimensionlessCoord(args.xi, args.tau)
    rec, ms = timed(args.pulse, args.method, c, quad, cfg)
    out = {
        "pulse": args.pulse, "method": args.method, "xi": c.xi, "tau": c.tau,
        "value": rec.value, "error_estimate": rec.error_estimate,
        "function_evals": rec.function_evals, "wall_time_ms": ms,
        "status": "ok" if rec.converged else "no_converge",
    }
    if args.format == "json":
        print(json.dumps(out))
    else:
        for key, val in out.items():
            print(f"{key}: {_fmt(val) if isinstance(val, float) else val}")
    if not rec.converged:
        print(f"error: {args.method} did not converge "
              f"(error estimate {rec.error_estimate})", file=sys.stderr)
        return EXIT_NO_CONVERGE
    return EXIT_OK


def _cmd_sweep(args, quad, cfg) -> int:
    spec = _sweep_spec(args)
    rows = run_sweep(spec, quad, cfg)
    if args.out is None:
        write_csv(rows, sys.stdout)
    else:
        with open(args.out, "w", newline="") as fh:
            write_csv(rows, fh)
    failed = sum(1 for _, _, rec in rows if rec is None or not rec.converged)
    if failed:
        print(f"error: {failed} of {len(rows)} evaluations failed", file=sys.stderr)
        return EXIT_NO_CONVERGE
    return EXIT_OK


def _cmd_compare(args, quad, cfg) -> int:
    spec = _sweep_spec(args)
    if len(spec.methods) != 2:
        raise UsageError("compare needs exactly two --methods")
    report, ok = compare_report(spec, quad, cfg)
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return EXIT_OK if ok else EXIT_NO_CONVERGE


def _cmd_bench(args, quad, cfg) -> int:
    if (args.xi is None) != (args.tau is None):
        raise UsageError("bench needs both --xi and --tau lists, or neither")
    if args.xi is not None:
        check_methods(args.pulse, args.methods)
        grid = [DimensionlessCoord(x, t) for x in args.xi for t in args.tau]
    else:
        grid = _sweep_spec(args).grid()
    report, ok = bench_report(args.pulse, grid, args.methods, args.repeats, quad, cfg)
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return EXIT_OK if ok else EXIT_NO_CONVERGE


COMMANDS = {"eval": _cmd_eval, "sweep": _cmd_sweep, "compare": _cmd_compare,
            "bench": _cmd_bench}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        quad, cfg = _numerics(args)
        return COMMANDS[args.command](args, quad, cfg)
    except (UsageError, DomainError) as exc:
        print(f"kvwave: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
