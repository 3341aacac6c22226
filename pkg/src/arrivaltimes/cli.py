"""Command-line front end writing arrival-time data as CSV.

Subcommands::

    free      Kijowski / free-detector distributions (positive, sym, antisym, general)
    barrier   distributions behind a square barrier (pot, kn, tilde)
    scan      mean arrival and tunneling times over barrier height or width
    validate  Crank-Nicolson oracle against the finite-width stationary theory

Every file starts with ``#`` manifest lines listing all parameters, so a run
can be repeated exactly.  Exit codes: 0 success, 1 numerical failure, 2 usage.
"""

from __future__ import annotations

import argparse
import io
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial

import numpy as np

from . import __version__
from .distributions import (TimeDistribution, kijowski, on_auto_grid, pi_kn, pi_on_barrier,
                            pi_on_general, pi_tilde, pi_finite_eps)
from .exceptions import ConfigurationError, DomainError
from .moments import TimingReport, timing_report
from .potential import AbsorberScaling, standard_profile
from .tdse import l1_discrepancy, propagate
from .units import Units
from .wavepacket import GaussianSpec, MomentumAmplitude

OUTPUT_DIR_ENV = "ARRIVALTIMES_OUTPUT_DIR"


def fmt(value) -> str:
    """Locale-independent 12-significant-digit formatting."""
    if isinstance(value, str):
        return value
    return f"{float(value):.11e}"


class UsageError(Exception):
    pass


# -- output -----------------------------------------------------------------

def manifest(args: argparse.Namespace) -> list[tuple[str, str]]:
    items = [("tool", "arrivaltimes"), ("version", __version__), ("subcommand", args.command)]
    for name in sorted(vars(args)):
        if name in ("command", "func", "jobs"):
            continue
        value = getattr(args, name)
        items.append((name, repr(value) if not isinstance(value, str) else value))
    return items


def render(args, columns, rows, extra=()) -> str:
    buf = io.StringIO()
    for key, value in list(manifest(args)) + list(extra):
        buf.write(f"# {key} = {value}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def emit(args, text: str) -> None:
    path = args.output
    if path is None and os.environ.get(OUTPUT_DIR_ENV):
        path = os.path.join(os.environ[OUTPUT_DIR_ENV], f"{args.command}.csv")
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(text)


# -- shared parameters ------------------------------------------------------

def add_packet_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--x0", type=float, default=-50.0, help="mean initial position (default -50)")
    p.add_argument("--dx", type=float, default=10.0, help="position spread (default 10)")
    p.add_argument("--v0", type=float, default=1.0, help="mean velocity (default 1)")
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--n-k", type=int, default=400, help="Gauss-Legendre nodes in k")
    p.add_argument("--output", "-o", default=None, help=f"output CSV (default stdout or ${OUTPUT_DIR_ENV})")


def add_time_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n-t", type=int, default=1200, help="time points")
    p.add_argument("--t-min", type=float, default=None)
    p.add_argument("--t-max", type=float, default=None)


def packet(args) -> GaussianSpec:
    if args.v0 <= 0:
        raise UsageError("--v0 must be positive")
    return GaussianSpec(args.x0, args.dx, args.v0, Units(args.mass, args.hbar))


def distribution_on_grid(args, spec: GaussianSpec, func) -> TimeDistribution:
    if (args.t_min is None) != (args.t_max is None):
        raise UsageError("--t-min and --t-max must be given together")
    if args.n_t < 2:
        raise UsageError("--n-t must be at least 2")
    if args.t_min is not None:
        if not args.t_min < args.t_max:
            raise UsageError("--t-min must be smaller than --t-max")
        return func(np.linspace(args.t_min, args.t_max, args.n_t))
    return on_auto_grid(func, spec, n=args.n_t)


def write_distribution(args, dist: TimeDistribution) -> None:
    extra = [("total", fmt(dist.total))]
    emit(args, render(args, ["t", "Pi"], zip(dist.t, dist.density), extra))


# -- subcommands ------------------------------------------------------------

def cmd_free(args) -> int:
    spec = packet(args)
    if args.mode == "positive":
        amp = MomentumAmplitude.from_gaussian(spec, args.n_k)
        dist = distribution_on_grid(args, spec, partial(kijowski, amp))
    else:
        if args.mode == "general":
            amp = MomentumAmplitude.full_line(spec, args.n_k)
        else:
            amp = MomentumAmplitude.mirrored(spec, 1.0 if args.mode == "sym" else -1.0, args.n_k)
        dist = distribution_on_grid(args, spec, partial(pi_on_general, amp))
    write_distribution(args, dist)
    return 0


_BARRIER_VARIANTS = {"pot": pi_on_barrier, "kn": pi_kn, "tilde": pi_tilde}


def cmd_barrier(args) -> int:
    spec = packet(args)
    amp = MomentumAmplitude.from_gaussian(spec, args.n_k)
    func = _BARRIER_VARIANTS[args.variant]
    dist = distribution_on_grid(args, spec, lambda t: func(amp, args.U, args.l, t))
    write_distribution(args, dist)
    return 0


def _scan_point(spec: GaussianSpec, n_k: int, point: tuple[float, float]) -> TimingReport:
    U, l = point
    return timing_report(spec, U, l, MomentumAmplitude.from_gaussian(spec, n_k))


def scan_values(args) -> np.ndarray:
    if args.values:
        values = np.array(sorted(args.values), dtype=float)
    elif args.start is not None and args.stop is not None:
        values = np.linspace(args.start, args.stop, args.num) if args.num > 0 else np.array([])
    else:
        raise UsageError("give either --values or --start/--stop/--num")
    if values.size == 0:
        raise UsageError("empty scan range")
    return values


def cmd_scan(args) -> int:
    spec = packet(args)
    values = scan_values(args)
    if args.param == "height":
        points = [(float(u), args.l) for u in values]
    else:
        points = [(args.U, float(l)) for l in values]
    work = partial(_scan_point, spec, args.n_k)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(work, points))
    else:
        reports = [work(p) for p in points]
    columns = list(TimingReport.FIELDS) + ["delay"]
    rows = [r.row() + (r.delay,) for r in reports]
    extra = []
    if args.param == "height":
        delay = np.array([r.delay for r in reports])
        flips = np.nonzero(np.sign(delay[:-1]) * np.sign(delay[1:]) < 0)[0]
        crossings = [values[i] - delay[i] * (values[i + 1] - values[i]) / (delay[i + 1] - delay[i]) for i in flips]
        extra.append(("delay_sign_change_U", " ".join(fmt(c) for c in crossings) or "none"))
    emit(args, render(args, columns, rows, extra))
    return 0


def cmd_validate(args) -> int:
    spec = packet(args)
    scaling = AbsorberScaling(args.case, args.v0l0, args.eps, args.alpha)
    profile = standard_profile(args.profile, scaling, U=args.U, a=args.b - args.l, b=args.b,
                               units=spec.units)
    grid_dx = args.grid_dx if args.grid_dx is not None else args.eps / 8
    run = propagate(spec, profile, args.t_final, grid_dx, args.dt)
    amp = MomentumAmplitude.from_gaussian(spec, args.n_k)
    theory = pi_finite_eps(amp, profile, run.t_mid).density
    l1 = l1_discrepancy(run.t_mid, run.rate, theory)
    ok = l1 < args.tol and run.bookkeeping_error < 1e-6
    rows = [
        ("l1_relative", fmt(l1)),
        ("bookkeeping_error", fmt(run.bookkeeping_error)),
        ("absorbed_tdse", fmt(run.absorbed[-1])),
        ("absorbed_theory", fmt(np.trapezoid(theory, run.t_mid))),
        ("grid_points", str(run.x.size)),
        ("status", "PASS" if ok else "FAIL"),
    ]
    emit(args, render(args, ["metric", "value"], rows))
    if args.series:
        with open(args.series, "w", encoding="ascii", newline="\n") as fh:
            fh.write(render(args, ["t", "rate_tdse", "rate_theory"], zip(run.t_mid, run.rate, theory)))
    return 0 if ok else 1


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="arrivaltimes", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("free", help="free arrival-time distributions")
    add_packet_args(p)
    add_time_args(p)
    p.add_argument("--mode", choices=["positive", "sym", "antisym", "general"], default="positive")
    p.set_defaults(func=cmd_free)

    p = sub.add_parser("barrier", help="distributions behind a square barrier")
    add_packet_args(p)
    add_time_args(p)
    p.add_argument("--U", type=float, required=True, help="barrier height")
    p.add_argument("--l", type=float, required=True, help="barrier width")
    p.add_argument("--variant", choices=sorted(_BARRIER_VARIANTS), default="pot")
    p.set_defaults(func=cmd_barrier)

    p = sub.add_parser("scan", help="timing report over barrier height or width")
    add_packet_args(p)
    p.add_argument("--param", choices=["height", "width"], required=True)
    p.add_argument("--values", type=float, nargs="+")
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--num", type=int, default=11)
    p.add_argument("--U", type=float, default=1.0, help="fixed height for width scans")
    p.add_argument("--l", type=float, default=10.0, help="fixed width for height scans")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("validate", help="Crank-Nicolson oracle vs stationary-state theory")
    add_packet_args(p)
    p.set_defaults(n_k=200)
    p.add_argument("--profile", choices=["free", "barrier"], default="free")
    p.add_argument("--eps", type=float, default=0.2)
    p.add_argument("--v0l0", type=float, default=0.01)
    p.add_argument("--case", choices=["a", "b"], default="a")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--U", type=float, default=0.3)
    p.add_argument("--l", type=float, default=10.0)
    p.add_argument("--b", type=float, default=-1.0, help="right barrier edge")
    p.add_argument("--grid-dx", type=float, default=None, help="grid spacing (default eps/8)")
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--t-final", type=float, default=120.0)
    p.add_argument("--tol", type=float, default=0.02, help="L1 pass threshold")
    p.add_argument("--series", default=None, help="optional CSV of both rate series")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigurationError, DomainError) as exc:
        parser.error(f"{args.command}: {exc}")
    except ArithmeticError as exc:
        print(f"arrivaltimes: numerical failure: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
