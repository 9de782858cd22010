"""Named simulation setups, their JSON form, and post-run checks."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace

import numpy as np

from .analysis import GrowthSeries, growth_bounds, growth_rate
from .errors import UnknownScenario
from .forcing import Forcing
from .geometry import (DomainSpec, Disk, Hole, Rect, build_grid, forcing_margin,
                       reference_spacing)
from .solver import RunResult, SolverParams, run
from .theta import SpiralCenter, ThetaField


@dataclass(frozen=True)
class InitialCondition:
    """Initial surface: a constant, an angular profile amp * (x/|x|)_1, or samples."""

    kind: str  # "constant" | "angular" | "grid"
    value: float = 0.0
    samples: np.ndarray | None = None

    def node_values(self, grid) -> np.ndarray:
        if self.kind == "grid":
            return np.asarray(self.samples, dtype=float)
        if self.kind == "constant":
            return np.full((grid.nx, grid.ny), self.value)
        xs, ys = grid.node_mesh()
        rho = np.hypot(xs, ys)
        safe = np.maximum(rho, 1e-12)
        return self.value * xs / safe

    def to_json(self) -> dict:
        if self.kind == "grid":
            return {"kind": "grid", "samples": self.samples.tolist()}
        return {"kind": self.kind, "value": self.value}

    @staticmethod
    def from_json(data: dict) -> "InitialCondition":
        if data["kind"] == "grid":
            return InitialCondition("grid", samples=np.asarray(data["samples"], dtype=float))
        return InitialCondition(data["kind"], float(data.get("value", 0.0)))


@dataclass(frozen=True)
class Scenario:
    name: str
    domain: DomainSpec
    forcing: Forcing
    initial: InitialCondition
    params: SolverParams
    strip: Rect | None = None
    outer_disks: tuple[Disk, ...] = ()
    checks: tuple[str, ...] = ()
    h: float | None = None

    @property
    def masked_outer(self) -> bool:
        return len(self.outer_disks) > 0

    def spacing(self) -> float:
        if self.h is not None:
            return self.h
        if self.masked_outer:
            return self.domain.hole_radius / 10.0
        return reference_spacing(self.domain)

    def centers(self) -> tuple[SpiralCenter, ...]:
        return tuple(SpiralCenter(hl.center[0], hl.center[1], hl.strength)
                     for hl in self.domain.holes)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "domain": {
                "outer_radius": self.domain.outer_radius,
                "holes": [{"center": list(hl.center), "radius": hl.radius,
                           "strength": hl.strength} for hl in self.domain.holes],
            },
            "forcing": self.forcing.to_json(),
            "initial": self.initial.to_json(),
            "params": {
                "epsilon": self.params.epsilon,
                "cfl": self.params.cfl,
                "t_end": self.params.t_end,
                "snapshot_stride": self.params.snapshot_stride,
                "scheme": self.params.scheme,
            },
            "strip": ({"x_half": self.strip.x_half, "y_half": self.strip.y_half}
                      if self.strip else None),
            "outer_disks": [{"center": list(d.center), "radius": d.radius}
                            for d in self.outer_disks],
            "checks": list(self.checks),
            "h": self.h,
        }

    @staticmethod
    def from_json(data: dict) -> "Scenario":
        dom = data["domain"]
        domain = DomainSpec(
            outer_radius=float(dom["outer_radius"]),
            holes=tuple(Hole((float(h["center"][0]), float(h["center"][1])),
                             float(h["radius"]), int(h["strength"]))
                        for h in dom["holes"]))
        strip = data.get("strip")
        disks = tuple(Disk((float(d["center"][0]), float(d["center"][1])),
                           float(d["radius"])) for d in data.get("outer_disks", []))
        return Scenario(
            name=data["name"],
            domain=domain,
            forcing=Forcing.from_json(data["forcing"]),
            initial=InitialCondition.from_json(data["initial"]),
            params=SolverParams(**data["params"]),
            strip=Rect(float(strip["x_half"]), float(strip["y_half"])) if strip else None,
            outer_disks=disks,
            checks=tuple(data.get("checks", ())),
            h=data.get("h"))


def _annulus(radius_outer: float, radius_hole: float) -> DomainSpec:
    return DomainSpec(radius_outer, (Hole((0.0, 0.0), radius_hole, 1),))


def _opposite_pair(radius_outer: float, offset: float, radius_hole: float) -> DomainSpec:
    return DomainSpec(radius_outer, (Hole((-offset, 0.0), radius_hole, 1),
                                     Hole((offset, 0.0), radius_hole, -1)))


def catalog() -> dict[str, Scenario]:
    """Built-in scenarios at their reference configurations."""
    return {
        "annulus_constant": Scenario(
            name="annulus_constant",
            domain=_annulus(2.0, 0.5),
            forcing=Forcing.constant(3.0),
            initial=InitialCondition("constant", 0.0),
            params=SolverParams(t_end=20.0),
            checks=("barrier", "growth_bounds_contain_slope")),
        "annulus_radial": Scenario(
            name="annulus_radial",
            domain=_annulus(2.0, 0.5),
            forcing=Forcing.radial(1.0),
            initial=InitialCondition("constant", 0.0),
            params=SolverParams(t_end=20.0),
            checks=("barrier", "sc_matches_radial")),
        "lipschitz_regime": Scenario(
            name="lipschitz_regime",
            domain=_annulus(1.0, 0.5),
            forcing=Forcing.constant(10.0),
            initial=InitialCondition("constant", 0.0),
            params=SolverParams(t_end=20.0),
            checks=("margin_positive", "barrier", "lipschitz")),
        "opposite_pair_strip": Scenario(
            name="opposite_pair_strip",
            domain=_opposite_pair(2.5, 0.8, 0.3),
            forcing=Forcing.constant(1.0),
            initial=InitialCondition("constant", 0.0),
            params=SolverParams(t_end=30.0),
            strip=Rect(0.8, 0.3),
            checks=("barrier", "bounded", "plateau")),
        "inactive_pair": Scenario(
            name="inactive_pair",
            domain=_opposite_pair(3.0, 0.8, 0.3),
            forcing=Forcing.constant(1.0),
            initial=InitialCondition("constant", 0.0),
            params=SolverParams(t_end=50.0),
            checks=("barrier", "sc_small", "plateau")),
        "pinched_single": Scenario(
            name="pinched_single",
            domain=DomainSpec(2.8, (Hole((0.0, 0.0), 0.25, 1),)),
            forcing=Forcing.constant(1.0),
            initial=InitialCondition("constant", 0.0),
            params=SolverParams(t_end=40.0),
            outer_disks=(Disk((-1.3, 0.0), 1.5), Disk((1.3, 0.0), 1.5)),
            checks=("barrier", "sc_small_qualitative")),
    }


def build_scenario(name_or_path: str) -> Scenario:
    """Look up a catalog scenario or load one from a JSON file."""
    table = catalog()
    if name_or_path in table:
        return table[name_or_path]
    if os.path.exists(name_or_path):
        with open(name_or_path) as fh:
            return Scenario.from_json(json.load(fh))
    raise UnknownScenario(
        f"{name_or_path!r} is neither a catalog name {sorted(table)} nor a config file")


def rotating_exact(points, t: float, c0: float, amplitude: float) -> np.ndarray:
    """Rigidly rotating profile amp*(R_{-c0 t} x/|x|)_1 + c0*t (radial forcing c0|x|)."""
    pts = np.asarray(points, dtype=float)
    rho = np.maximum(np.hypot(pts[..., 0], pts[..., 1]), 1e-12)
    ang = c0 * t
    rotated_x = (np.cos(ang) * pts[..., 0] + np.sin(ang) * pts[..., 1]) / rho
    return amplitude * rotated_x + c0 * t


def run_scenario(scenario: Scenario, *, h: float | None = None,
                 t_end: float | None = None, epsilon: float | None = None,
                 scheme: str | None = None, cfl: float | None = None,
                 snapshot_every: float | None = None) -> RunResult:
    """Build grid and fields for a scenario and march it to t_end."""
    params = scenario.params
    updates = {}
    if t_end is not None:
        updates["t_end"] = t_end
    if epsilon is not None:
        updates["epsilon"] = epsilon
    if scheme is not None:
        updates["scheme"] = scheme
    if cfl is not None:
        updates["cfl"] = cfl
    if updates:
        params = replace(params, **updates)
    spacing = h if h is not None else scenario.spacing()
    grid = build_grid(scenario.domain, spacing, strip=scenario.strip,
                      outer_disks=scenario.outer_disks or None)
    theta = ThetaField(grid, scenario.centers())
    u0 = scenario.initial.node_values(grid)
    if snapshot_every is None:
        snapshot_every = params.t_end / 8.0 if params.t_end > 0 else None
    times = None
    if snapshot_every and params.t_end > 0:
        times = np.arange(snapshot_every, params.t_end, snapshot_every)
    return run(grid, theta, forcing=scenario.forcing, u0=u0, params=params,
               snapshot_times=times)


def evaluate_checks(scenario: Scenario, result: RunResult) -> tuple[dict, dict]:
    """Evaluate the scenario's named checks; returns (pass map, detail map)."""
    diag = result.diagnostics
    series = GrowthSeries.from_diagnostics(diag)
    ts = np.asarray(diag.t)
    Ss = np.asarray(diag.S)
    passed: dict[str, bool] = {}
    details: dict[str, str] = {}

    for name in scenario.checks:
        if name == "barrier":
            v = diag.barrier_violation
            ok = v <= 1e-6
            detail = f"relative barrier excess {v:.3e}"
        elif name == "growth_bounds_contain_slope":
            lo, hi = growth_bounds(scenario.domain, result.forcing)
            if len(ts) < 2 or ts[-1] <= 0:
                ok, detail = False, "run too short to fit a growth rate"
            else:
                slope, _ = growth_rate(series)
                ok = 0.8 * lo <= slope <= 1.05 * hi
                detail = f"slope {slope:.4f} vs bracket [{lo:.4f}, {hi:.4f}]"
        elif name == "sc_matches_radial":
            c0 = result.forcing.value
            if len(ts) < 2 or ts[-1] <= 0:
                ok, detail = False, "run too short to fit a growth rate"
            else:
                slope, fekete = growth_rate(series)
                ok = abs(slope - c0) <= 0.05 * c0 and fekete >= 0.95 * c0
                detail = f"slope {slope:.4f}, fekete {fekete:.4f}, target {c0}"
        elif name == "margin_positive":
            m = forcing_margin(scenario.domain, result.forcing,
                               result.forcing.grad_sup(result.grid), grid=result.grid)
            ok = m > 0.0
            detail = f"margin {m:.4f}"
        elif name == "lipschitz":
            sel = ts >= 1.0
            grads = np.asarray(diag.sup_grad)[sel]
            if grads.size == 0:
                passed[name] = False
                details[name] = "run too short to reach the t >= 1 window"
                continue
            ref = grads[0]
            uts = np.asarray(diag.sup_ut)
            ok = bool(np.all(grads <= 2.0 * ref)
                      and np.all(uts <= diag.M * (1.0 + 1e-9)))
            detail = (f"sup|Du| in [{grads.min():.3f}, {grads.max():.3f}] vs ref "
                      f"{ref:.3f}; sup|u_t| max {uts.max():.3f} vs M {diag.M:.3f}")
        elif name == "bounded":
            theta_sup = float(np.abs(result.theta.theta[result.grid.classification != 0]).max())
            cap = diag.u0_sup + 2.0 * theta_sup + 2.0 * np.pi
            worst = max(float(np.abs(Ss).max()), float(np.abs(diag.min_u).max()))
            ok = worst <= cap
            detail = f"max |u| {worst:.3f} vs cap {cap:.3f}"
        elif name == "plateau":
            sel = ts >= 0.5 * ts[-1]
            spread = float(Ss[sel].max() - Ss[sel].min())
            ok = spread <= 0.5
            detail = f"S spread {spread:.4f} over final half"
        elif name == "sc_small":
            if ts[-1] <= 0:
                ok, detail = False, "run too short to measure S(T)/T"
            else:
                ratio = Ss[-1] / ts[-1]
                ok = ratio <= 0.1
                detail = f"S(T)/T = {ratio:.4f}"
        elif name == "sc_small_qualitative":
            c_max = result.state.c_max
            if ts[-1] <= 0:
                ok, detail = False, "run too short to measure S(T)/T"
            else:
                ratio = Ss[-1] / ts[-1]
                ok = ratio <= 0.2 * c_max
                detail = f"S(T)/T = {ratio:.4f} vs 0.2*c_max = {0.2 * c_max:.4f}"
        else:
            raise ValueError(f"scenario {scenario.name} declares unknown check {name!r}")
        passed[name] = bool(ok)
        details[name] = detail
    return passed, details
