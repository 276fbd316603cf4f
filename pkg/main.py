#!/usr/bin/env python3
"""
neckflow - mean curvature flow of Cassini surfaces of revolution
Command-line entry point.

Subcommands:
    evolve   run one surface to its first singularity
    search   bisect for the critical shape parameter
    sweep    classify a list of shape parameters (optionally fit the critical exponent)
    soliton  sample the translating soliton of a given speed
    compare  rescaled snapshots of a run against the unit soliton
    fit      blow-up rate, cusp and degenerate-neckpinch fits on a stored run
    hermite  coefficients of the rescaled Hermite polynomials

Usage:
    python main.py evolve --lambda 0 --n 400
    python main.py search --lo 0.85 --hi 0.95 --tol 1e-3 --n 1000 --jobs 2
    python main.py fit --run results/evolve_lambda=0.96_n=2000 --quantity H_center

Exit codes: 0 success, 1 usage, 2 numerical failure, 3 missing input or I/O.
"""

import argparse
import logging
import sys
import time
from pathlib import Path

import numpy as np
import pandas as pd

from src.analysis.asymptotics import SQRT2, fit_degenerate, fit_generic_pinch
from src.analysis.comparison import (
    comparison_frame,
    distance_series,
    mean_curvature_comparison,
    tip_matched_comparison,
)
from src.analysis.fitting import FIT_QUANTITIES, fit_power, guess_singular_time, singularity_type
from src.analysis.hermite import hermite, hermite_eval
from src.analysis.rescaling import cylinder_rescale, neck_rescaled_radius, pole_blowup
from src.critical.classify import sweep
from src.critical.exponent import critical_exponent, exponent_sensitivity, joint_exponent_fit
from src.critical.search import bisect_critical
from src.evolution.control import StepControl
from src.evolution.driver import evolve
from src.evolution.trace import Outcome
from src.geometry.cassini import CassiniShape
from src.soliton.bowl import solve_soliton
from src.utils.config import Config, RunConfig, parse_key_values
from src.utils.errors import (
    ConfigError,
    DomainError,
    FitError,
    MissingInputError,
    MonotonicityViolation,
    NeckflowError,
    NumericalFailure,
    SolverFailure,
)
from src.utils.io import (
    load_run,
    record_fit,
    save_run,
    write_csv,
    write_json,
    write_search,
    write_soliton,
    write_sweep,
)
from src.utils.logger import set_level, setup_logger

logger = setup_logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3

# CLI flag dest -> config key
RUN_FLAGS = {
    "lam": "lambda",
    "b": "b",
    "n": "n",
    "safety": "safety",
    "eps_pinch": "eps_pinch",
    "eps_extinct": "eps_extinct",
    "a2_cap": "a2_cap",
    "dt_min": "dt_min",
    "max_steps": "max_steps",
    "trace_every": "trace_every",
    "snapshot_cadence": "snapshot_cadence",
    "out": "output_dir",
}


class CliParser(argparse.ArgumentParser):
    """argparse with usage errors reported as exit status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def load_config(args, default_lambda=None) -> RunConfig:
    """Config file values overridden by any run flag given on the command line."""
    text = ""
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise MissingInputError(f"missing config file: {path}")
        text = path.read_text(encoding="utf-8")
    overrides = {key: getattr(args, dest, None) for dest, key in RUN_FLAGS.items()}
    if overrides["lambda"] is None and default_lambda is not None and "lambda" not in parse_key_values(text):
        overrides["lambda"] = default_lambda
    return RunConfig.from_text(text, **overrides)


def output_dir(args) -> Path:
    return Path(args.out) if args.out else Config.OUTPUT_DIR


def cmd_evolve(args) -> int:
    config = load_config(args)
    control = StepControl.from_config(config)
    start = time.time()
    result = evolve(CassiniShape.from_lambda(config.lam, config.b), config.n, control)
    wall_time = time.time() - start
    directory = save_run(config, result, wall_time, args.run_dir)

    report = result.report
    print('=' * 70)
    print(f"lambda={config.lam!r}  n={config.n}  steps={report.steps}  wall={wall_time:.1f}s")
    if report.outcome is Outcome.NUMERICAL_FAILURE:
        print(f"❌ {report.outcome.value}: {report.message}")
        return EXIT_NUMERICAL
    print(f"✓ {report.outcome.value}  T_est={report.T_est:.8g}")
    if report.pinch_location is not None:
        print(f"  pinch at x={report.pinch_location:.6g}")
    print(f"  output: {directory}")
    return EXIT_OK


def cmd_search(args) -> int:
    config = load_config(args, default_lambda=args.lo)
    control = StepControl.from_config(config)
    jobs = args.jobs or Config.JOBS
    estimate = bisect_critical(args.lo, args.hi, args.tol, config.n, control, jobs=jobs, b=config.b)
    path = write_search(estimate, output_dir(args) / f"search_n={config.n}.json")
    print(f"✓ lambda_c in [{estimate.lambda_lo:.8g}, {estimate.lambda_hi:.8g}] "
          f"after {estimate.iterations} bisections ({len(estimate.runs)} runs)")
    print(f"  output: {path}")
    return EXIT_OK


def sweep_values(args) -> list:
    if args.lambdas:
        return [float(v) for v in args.lambdas]
    if args.start is None or args.stop is None:
        raise DomainError("sweep needs --lambdas or both --start and --stop")
    return [round(float(v), 12) for v in np.linspace(args.start, args.stop, args.num)]


def cmd_sweep(args) -> int:
    lambdas = sweep_values(args)
    config = load_config(args, default_lambda=lambdas[0])
    control = StepControl.from_config(config)
    jobs = args.jobs or Config.JOBS
    runs = sweep(lambdas, config.n, control, jobs=jobs, b=config.b)
    out = output_dir(args)
    path = write_sweep(runs, out / f"sweep_n={config.n}.csv")

    for run in runs:
        status = "❌" if run.error else "✓"
        print(f"{status} lambda={run.lam:.6f}  {run.outcome.value:<18} H_pole_max={run.H_pole_max:.6g}")
    print(f"  output: {path}")

    if args.lambda_c is not None:
        fit = critical_exponent(runs, args.lambda_c)
        summary = {"lambda_c": args.lambda_c, "fit": fit.as_dict()}
        sensitivity = exponent_sensitivity(runs, args.lambda_c)
        write_csv(sensitivity, out / f"exponent_sensitivity_n={config.n}.csv")
        try:
            summary["joint"] = joint_exponent_fit(runs, args.lambda_c).as_dict()
        except FitError as exc:
            logger.warning(f"Joint exponent fit skipped: {exc}")
        write_json(summary, out / f"exponent_n={config.n}.json")
        print(f"✓ critical exponent n={fit.exponent:.4f}  Lambda0={fit.prefactor:.4g}  "
              f"(rms {fit.residual:.3g}, {fit.points} runs)")
    return EXIT_OK


def cmd_soliton(args) -> int:
    sol = solve_soliton(args.speed, args.extent, args.tol)
    path = output_dir(args) if args.out else Config.OUTPUT_DIR / f"soliton_c={args.speed!r}.csv"
    write_soliton(sol, path)
    print(f"✓ soliton c={sol.c:g}: {len(sol)} samples to x={sol.x[-1]:.4g}, tip H={sol.H[0]:.12g}")
    print(f"  output: {path}")
    return EXIT_OK


def cmd_compare(args) -> int:
    record = load_run(args.run)
    snapshots = record.snapshots()
    out = Path(args.out) if args.out else record.directory
    window = args.window

    if args.tip_matched:
        frame = tip_matched_comparison(snapshots[-1], window, args.pole)
        path = write_csv(frame, out / f"tip_matched_{args.pole}.csv")
        print(f"✓ tip-matched soliton c={frame['c'].iloc[0]:.6g}  "
              f"max|dy|={np.max(np.abs(frame['y_flow'] - frame['y_model'])):.3g}")
        print(f"  output: {path}")
        return EXIT_OK

    rescaled = []
    for curve in snapshots[-args.last:] if args.last else snapshots:
        try:
            rc = pole_blowup(curve, args.pole)
        except DomainError as exc:
            logger.warning(f"Snapshot at t={curve.t:.6g} skipped: {exc}")
            continue
        if rc.graph_part().x[-1] >= window:
            rescaled.append(rc)
    if not rescaled:
        raise MissingInputError(f"no snapshot of {record.directory} covers x in [0, {window}] after rescaling")

    sol = solve_soliton(1.0, x_extent=1.5 * window + 1.0, tol=args.tol)
    distances = distance_series(rescaled, sol, window)
    write_csv(distances, out / "soliton_distance.csv")
    write_csv(comparison_frame(rescaled[-1], sol, window), out / "soliton_profile.csv")
    write_csv(mean_curvature_comparison(rescaled, sol), out / "soliton_mean_curvature.csv")

    final = distances.iloc[-1]
    print(f"✓ {len(rescaled)} rescaled snapshots vs unit soliton on [0, {window:g}]")
    print(f"  final Linf={final['Linf']:.4g}  L2={final['L2']:.4g}")
    print(f"  output: {out}")
    return EXIT_OK


def singular_time(record, T=None) -> float:
    if T is not None:
        return T
    T_est = float(record.manifest.get("T_est", np.nan))
    if np.isfinite(T_est) and T_est > record.trace.last.t:
        return T_est
    return guess_singular_time(record.trace)


def snapshot_near(snapshots, t_target: float):
    admissible = [c for c in snapshots if c.t < t_target] or snapshots[:1]
    return min(admissible, key=lambda c: abs(c.t - t_target))


def cmd_fit(args) -> int:
    record = load_run(args.run)
    out = Path(args.out) if args.out else record.directory

    if args.kind == "rate":
        T = singular_time(record, args.T)
        fit = fit_power(record.trace, args.quantity, T, refine=not args.no_refine)
        kind = singularity_type(fit)
        t = record.trace.column("t")
        mask = (t >= fit.window[0]) & (t <= fit.window[1])
        table = pd.DataFrame({
            "t": t[mask],
            args.quantity: record.trace.column(args.quantity)[mask],
            "model": fit.prefactor * (fit.T - t[mask]) ** fit.exponent,
        })
        write_csv(table, out / f"rate_{args.quantity}.csv")
        record_fit(record.directory, f"rate_{args.quantity}", {**fit.as_dict(), "type": kind})
        print(f"✓ {args.quantity} ~ (T - t)^{fit.exponent:.4f}  T={fit.T:.10g}  Type {kind}  "
              f"(rms {fit.residual:.3g}, {fit.points} records)")
        return EXIT_OK

    snapshots = record.snapshots()
    if args.kind == "cusp":
        curve = snapshots[-1]
        pf = fit_generic_pinch(curve, x_hi=args.x_hi)
        write_csv(pd.DataFrame({"x": pf.x, "y_flow": pf.y, "y_model": pf.model}), out / "cusp_fit.csv")
        record_fit(record.directory, "cusp", {"K": pf.K, "misfit": pf.misfit, "t": curve.t, "x_hi": args.x_hi})
        print(f"✓ cusp K={pf.K:.6g}  relative misfit={pf.misfit:.3%}")
        return EXIT_OK

    T = singular_time(record, args.T)
    curve = snapshot_near(snapshots, args.fraction * T)
    if args.kind == "neck":
        radius = neck_rescaled_radius(curve, T)
        record_fit(record.directory, "neck", {"radius": radius, "sqrt2": SQRT2, "t": curve.t, "T": T})
        print(f"✓ rescaled neck radius {radius:.6g} at t={curve.t:.8g} ({radius / SQRT2 - 1.0:+.2%} from sqrt 2)")
        return EXIT_OK

    rc = cylinder_rescale(curve, T)
    pf = fit_degenerate(rc, T, m=args.m, x_window=args.x_window, variable=args.variable)
    write_csv(pd.DataFrame({"x": pf.x, "y_flow": pf.y, "y_model": pf.model}), out / "degenerate_fit.csv")
    record_fit(record.directory, "degenerate", {
        "K": pf.K, "misfit": pf.misfit, "relative_misfit": pf.misfit / SQRT2,
        "m": args.m, "t": curve.t, "T": T, "variable": args.variable,
    })
    print(f"✓ degenerate m={args.m} K={pf.K:.6g}  RMS misfit={pf.misfit / SQRT2:.3%} of sqrt 2 at t={curve.t:.8g}")
    return EXIT_OK


def cmd_hermite(args) -> int:
    if args.x:
        frame = pd.DataFrame({"x": args.x, "value": hermite_eval(args.m, np.asarray(args.x, dtype=float))})
    else:
        coefficients = hermite(args.m)
        frame = pd.DataFrame({"power": np.arange(coefficients.size), "coefficient": coefficients})
    frame.to_csv(sys.stdout, index=False, float_format="%.17g")
    return EXIT_OK


def build_parser() -> CliParser:
    parser = CliParser(description='neckflow: mean curvature flow of Cassini surfaces')
    parser.add_argument('--verbose', action='store_true', help='debug logging')

    common = CliParser(add_help=False)
    common.add_argument('--out', default=None, help=f'output directory (default: $NECKFLOW_OUT or {Config.OUTPUT_DIR})')

    run = CliParser(add_help=False)
    run.add_argument('--config', default=None, help='key = value config file; flags override it')
    run.add_argument('--b', type=float, default=None, help='Cassini scale b')
    run.add_argument('--n', type=int, default=None, help='grid points')
    run.add_argument('--safety', type=float, default=None)
    run.add_argument('--eps-pinch', dest='eps_pinch', type=float, default=None)
    run.add_argument('--eps-extinct', dest='eps_extinct', type=float, default=None)
    run.add_argument('--a2-cap', dest='a2_cap', type=float, default=None)
    run.add_argument('--dt-min', dest='dt_min', type=float, default=None)
    run.add_argument('--max-steps', dest='max_steps', type=int, default=None)
    run.add_argument('--trace-every', dest='trace_every', type=int, default=None)
    run.add_argument('--snapshot-cadence', dest='snapshot_cadence', type=float, default=None)

    jobs = CliParser(add_help=False)
    jobs.add_argument('--jobs', type=int, default=None, help='worker processes (default: $NECKFLOW_JOBS or 1)')

    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('evolve', parents=[common, run], help='evolve one surface')
    p.add_argument('--lambda', dest='lam', type=float, default=None, help='shape parameter a/b')
    p.add_argument('--run-dir', dest='run_dir', default=None, help='write the run here instead of under --out')
    p.set_defaults(handler=cmd_evolve)

    p = sub.add_parser('search', parents=[common, run, jobs], help='bisect for the critical lambda')
    p.add_argument('--lo', type=float, default=0.85)
    p.add_argument('--hi', type=float, default=0.95)
    p.add_argument('--tol', type=float, default=1e-3)
    p.set_defaults(handler=cmd_search)

    p = sub.add_parser('sweep', parents=[common, run, jobs], help='classify many lambdas')
    p.add_argument('--lambdas', type=float, nargs='+', default=None)
    p.add_argument('--start', type=float, default=None)
    p.add_argument('--stop', type=float, default=None)
    p.add_argument('--num', type=int, default=10)
    p.add_argument('--lambda-c', dest='lambda_c', type=float, default=None,
                   help='fit H_pole_max ~ (lambda - lambda_c)^-n on the supercritical runs')
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser('soliton', help='sample the translating soliton')
    p.add_argument('--speed', type=float, default=1.0)
    p.add_argument('--extent', type=float, default=10.0)
    p.add_argument('--tol', type=float, default=1e-10)
    p.add_argument('--out', default=None, help=f'CSV file (default: {Config.OUTPUT_DIR}/soliton_c=<speed>.csv)')
    p.set_defaults(handler=cmd_soliton)

    p = sub.add_parser('compare', parents=[common], help='rescaled snapshots against the soliton')
    p.add_argument('--run', required=True, help='run directory written by evolve')
    p.add_argument('--window', type=float, default=2.0)
    p.add_argument('--pole', choices=['left', 'right'], default='left')
    p.add_argument('--last', type=int, default=None, help='only the last N snapshots')
    p.add_argument('--tip-matched', dest='tip_matched', action='store_true',
                   help='unscaled final cap against the soliton of matching tip curvature')
    p.add_argument('--tol', type=float, default=1e-10)
    p.set_defaults(handler=cmd_compare)

    p = sub.add_parser('fit', parents=[common], help='fits on a stored run')
    p.add_argument('--run', required=True, help='run directory written by evolve')
    p.add_argument('--kind', choices=['rate', 'cusp', 'neck', 'degenerate'], default='rate')
    p.add_argument('--quantity', choices=FIT_QUANTITIES, default='H_max')
    p.add_argument('--T', type=float, default=None, help='singular time (default: manifest T_est)')
    p.add_argument('--no-refine', dest='no_refine', action='store_true')
    p.add_argument('--x-hi', dest='x_hi', type=float, default=0.1)
    p.add_argument('--fraction', type=float, default=0.99, help='snapshot time as a fraction of T')
    p.add_argument('--m', type=int, default=4)
    p.add_argument('--x-window', dest='x_window', type=float, default=2.0)
    p.add_argument('--variable', choices=['physical', 'similarity'], default='physical')
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser('hermite', help='rescaled Hermite polynomial coefficients')
    p.add_argument('--m', type=int, required=True)
    p.add_argument('--x', type=float, nargs='+', default=None, help='evaluate at these points instead')
    p.set_defaults(handler=cmd_hermite)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        set_level(logging.DEBUG)

    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"❌ invalid configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalFailure, SolverFailure, MonotonicityViolation) as exc:
        print(f"❌ {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_IO
    except NeckflowError as exc:
        print(f"❌ {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
