"""Command line front end: run scenarios, check bounds, verify the build."""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import output, report
from .acceptance import AcceptanceSuite
from .analysis import GrowthSeries, growth_bounds, growth_rate, height, tip_growth_rate
from .errors import Blowup, HypothesisViolated, NumericalFailure, SpiralFlowError
from .extraction import extract_spirals
from .geometry import compute_C0, compute_K0, forcing_margin
from .scenarios import build_scenario, catalog, evaluate_checks, run_scenario
from .solver import RunResult

HEIGHT_STEP = 1.0  # step height h0 used for the emitted terrace maps


class _CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _CliError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="spiralflow",
                     description="Spiral growth by forced curvature flow on "
                                 "a holed planar domain.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="time-step a scenario and write artifacts")
    check_p = sub.add_parser("check", help="static bounds only, no time stepping")
    for p in (run_p, check_p):
        p.add_argument("--scenario", required=True,
                       help="catalog name or path to a scenario JSON file")
        p.add_argument("--out", default="out", help="output directory")
    run_p.add_argument("--h", type=float, default=None, help="grid spacing")
    run_p.add_argument("--t-end", type=float, default=None, help="final time")
    run_p.add_argument("--epsilon", type=float, default=None,
                       help="gradient regularization")
    run_p.add_argument("--scheme", choices=("central", "upwind"), default=None,
                       help="forcing gradient discretization")
    run_p.add_argument("--snapshot-every", type=float, default=None,
                       help="model-time interval between field snapshots")

    verify_p = sub.add_parser("verify", help="run the analytic acceptance suite")
    verify_p.add_argument("--out", default="out", help="output directory")
    return parser


def _static_quantities(scenario, grid=None):
    if scenario.masked_outer:
        return None, None, None
    C0 = compute_C0(scenario.domain)
    K0 = compute_K0(scenario.domain)
    margin = forcing_margin(scenario.domain, scenario.forcing,
                            scenario.forcing.grad_sup(grid), grid=grid)
    return C0, K0, margin


def _bounds_or_none(scenario, grid=None):
    try:
        return list(growth_bounds(scenario.domain, scenario.forcing, grid=grid))
    except HypothesisViolated:
        return None


def _cmd_check(args) -> int:
    scenario = build_scenario(args.scenario)
    C0, K0, margin = _static_quantities(scenario)
    bounds = _bounds_or_none(scenario)
    outdir = output.ensure_dir(args.out)
    summary = {
        "scenario": scenario.name,
        "h": scenario.spacing(),
        "epsilon": scenario.params.epsilon,
        "t_end": scenario.params.t_end,
        "C0": C0,
        "K0": K0,
        "forcing_margin": margin,
        "growth_bounds": bounds,
        "Sc_slope": None,
        "Sc_fekete": None,
        "tip_rate": None,
        "checks": {},
    }
    path = os.path.join(outdir, "summary.json")
    output.write_summary(path, summary)
    print(f"C0 = {C0}, K0 = {K0}, forcing_margin = {margin}, "
          f"growth_bounds = {bounds}")
    print(f"wrote {path}")
    return 0


def _write_run_artifacts(scenario, result: RunResult, outdir: str) -> dict:
    grid, theta = result.grid, result.theta
    output.write_diagnostics_csv(os.path.join(outdir, "diagnostics.csv"),
                                 result.diagnostics)
    curves_all = []
    tip_times, tips = [], []
    active = grid.classification > 0
    for idx, (t, u) in enumerate(result.snapshots):
        output.write_fields_vtk(os.path.join(outdir, f"fields_{idx:04d}.vtk"),
                                grid, theta, u, t)
        curves_all.extend(extract_spirals(u, theta, grid, t=t))
        tip_times.append(t)
        tips.append(float(height(u, theta, HEIGHT_STEP)[active].max()))
    t_final, u_final = result.snapshots[-1]
    output.write_heights_vtk(os.path.join(outdir, "heights.vtk"), grid, theta,
                             u_final, t_final, HEIGHT_STEP)
    output.write_spirals_csv(os.path.join(outdir, "spirals.csv"), curves_all)

    report.plot_growth(result.diagnostics, os.path.join(outdir, "growth.png"))
    final_curves = [c for c in curves_all if c.t == t_final]
    report.plot_spirals(grid, final_curves, os.path.join(outdir, "spirals.png"),
                        title=f"{scenario.name} at t = {t_final:g}")
    report.plot_height(grid, height(u_final, theta, HEIGHT_STEP),
                       os.path.join(outdir, "height.png"))

    tip_rate = None
    if len(tip_times) >= 2:
        tip_rate = tip_growth_rate(np.asarray(tip_times), np.asarray(tips))
    return {"tip_rate": tip_rate}


def _cmd_run(args) -> int:
    scenario = build_scenario(args.scenario)
    result = run_scenario(scenario, h=args.h, t_end=args.t_end,
                          epsilon=args.epsilon, scheme=args.scheme,
                          snapshot_every=args.snapshot_every)
    outdir = output.ensure_dir(args.out)
    extra = _write_run_artifacts(scenario, result, outdir)

    C0, K0, margin = _static_quantities(scenario, grid=result.grid)
    bounds = _bounds_or_none(scenario, grid=result.grid)
    slope = fekete = None
    if len(result.diagnostics.t) >= 2 and result.params.t_end > 0:
        series = GrowthSeries.from_diagnostics(result.diagnostics)
        slope, fekete = growth_rate(series)
    checks, details = evaluate_checks(scenario, result)
    summary = {
        "scenario": scenario.name,
        "h": result.grid.h,
        "epsilon": result.params.epsilon,
        "t_end": result.params.t_end,
        "C0": C0,
        "K0": K0,
        "forcing_margin": margin,
        "growth_bounds": bounds,
        "Sc_slope": slope,
        "Sc_fekete": fekete,
        "tip_rate": extra["tip_rate"],
        "checks": checks,
    }
    output.write_summary(os.path.join(outdir, "summary.json"), summary)
    for name, ok in checks.items():
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {details[name]}")
    print(f"wrote artifacts to {outdir}")
    return 0


def _cmd_verify(args) -> int:
    outdir = output.ensure_dir(args.out)
    suite = AcceptanceSuite(progress=print)
    results = suite.run_all()
    short = run_scenario(catalog()["annulus_constant"], t_end=0.5)
    output.write_diagnostics_csv(os.path.join(outdir, "diagnostics.csv"),
                                 short.diagnostics)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 3 if failed else 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "check":
            return _cmd_check(args)
        return _cmd_verify(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (Blowup, NumericalFailure) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (SpiralFlowError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
