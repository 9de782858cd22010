"""Analytic acceptance suite: exact solutions, bounds, and invariants.

Each criterion is independent and reports one pass/fail line. Runs are cached
so criteria that share a simulation (barrier checks, extraction on the
rotating profile) do not recompute it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import output
from .analysis import (GrowthSeries, growth_rate, height, sandwich_constant,
                       winding_index)
from .extraction import extract_spirals, hausdorff_distance
from .forcing import Forcing
from .geometry import DomainSpec, Hole, build_grid, forcing_margin
from .scenarios import (InitialCondition, Scenario, catalog, rotating_exact,
                        run_scenario)
from .solver import (SCHEME_UPWIND, SolverParams, SolverState, stable_dt, step)
from .theta import SpiralCenter, ThetaField, circulation


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag}  {self.number:2d} {self.name}: {self.detail}"


def _rotating_scenario(h: float) -> Scenario:
    return Scenario(
        name=f"rotating_h{h:g}",
        domain=DomainSpec(2.0, (Hole((0.0, 0.0), 0.5, 1),)),
        forcing=Forcing.radial(1.0),
        initial=InitialCondition("angular", 0.3),
        params=SolverParams(epsilon=1e-3, t_end=1.0),
        h=h)


class AcceptanceSuite:
    def __init__(self, progress=None):
        self._runs: dict[str, object] = {}
        self._progress = progress

    def _note(self, msg: str) -> None:
        if self._progress is not None:
            self._progress(msg)

    def scenario_run(self, name: str):
        if name not in self._runs:
            self._note(f"running scenario {name}")
            self._runs[name] = run_scenario(catalog()[name])
        return self._runs[name]

    def rotating_run(self, h: float):
        key = f"rotating_{h:g}"
        if key not in self._runs:
            self._note(f"running rotating profile at h={h:g}")
            self._runs[key] = run_scenario(_rotating_scenario(h))
        return self._runs[key]

    # -- criteria ---------------------------------------------------------

    def rotating_convergence(self) -> CriterionResult:
        spacings = (1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0)
        errors = []
        for h in spacings:
            result = self.rotating_run(h)
            grid = result.grid
            interior = grid.classification == 1
            xs, ys = grid.node_mesh()
            pts = np.stack([xs[interior], ys[interior]], axis=-1)
            exact = rotating_exact(pts, 1.0, 1.0, 0.3)
            errors.append(float(np.abs(result.state.u[interior] - exact).max()))
        orders = [np.log2(errors[i] / errors[i + 1]) for i in range(len(errors) - 1)]
        ok = errors[1] <= 0.08 and min(orders) >= 0.7
        detail = (f"Linf errors {[f'{e:.4f}' for e in errors]}, "
                  f"orders {[f'{o:.2f}' for o in orders]}")
        return CriterionResult(1, "rotating_profile_convergence", ok, detail)

    def radial_growth_rate(self) -> CriterionResult:
        result = self.scenario_run("annulus_radial")
        series = GrowthSeries.from_diagnostics(result.diagnostics)
        slope, fekete = growth_rate(series)
        ok = abs(slope - 1.0) <= 0.05 and fekete >= 0.95
        detail = f"Sc_slope {slope:.4f}, Sc_fekete {fekete:.4f}, target 1"
        return CriterionResult(2, "radial_forcing_growth_rate", ok, detail)

    def constant_growth_bracket(self) -> CriterionResult:
        result = self.scenario_run("annulus_constant")
        series = GrowthSeries.from_diagnostics(result.diagnostics)
        slope, _ = growth_rate(series)
        ok = 1.2 <= slope <= 6.3
        detail = f"Sc_slope {slope:.4f} vs bracket [1.2, 6.3]"
        return CriterionResult(3, "constant_forcing_growth_bracket", ok, detail)

    def margin_arithmetic(self) -> CriterionResult:
        domain = DomainSpec(1.0, (Hole((0.0, 0.0), 0.5, 1),))
        cases = ((8.0, 0.0), (9.0, 13.0), (4.0, -32.0))
        worst = 0.0
        for value, expected in cases:
            got = forcing_margin(domain, Forcing.constant(value), 0.0)
            worst = max(worst, abs(got - expected))
        ok = worst <= 1e-10
        detail = f"max |margin - closed form| = {worst:.3e}"
        return CriterionResult(4, "forcing_margin_arithmetic", ok, detail)

    def inactive_pair_plateau(self) -> CriterionResult:
        result = self.scenario_run("inactive_pair")
        diag = result.diagnostics
        ts = np.asarray(diag.t)
        Ss = np.asarray(diag.S)
        ratio = Ss[-1] / ts[-1]
        window = (ts >= 25.0) & (ts <= 50.0)
        spread = float(Ss[window].max() - Ss[window].min())
        ok = ratio <= 0.1 and spread <= 0.5
        detail = f"S(T)/T {ratio:.4f} (cap 0.1), plateau spread {spread:.4f} (cap 0.5)"
        return CriterionResult(5, "opposite_pair_inactive", ok, detail)

    def barrier_invariant(self) -> CriterionResult:
        worst_name, worst = "", 0.0
        for name in catalog():
            result = self.scenario_run(name)
            v = result.diagnostics.barrier_violation
            if v > worst:
                worst_name, worst = name, v
        ok = worst <= 1e-6
        detail = f"max relative barrier excess {worst:.3e} ({worst_name or 'none'})"
        return CriterionResult(6, "barrier_bound_all_scenarios", ok, detail)

    def comparison_principle(self) -> CriterionResult:
        h = 1.0 / 16.0
        domain = DomainSpec(2.0, (Hole((0.0, 0.0), 0.5, 1),))
        grid = build_grid(domain, h)
        theta = ThetaField(grid, (SpiralCenter(0.0, 0.0, 1),))
        forcing = Forcing.constant(3.0)
        params = SolverParams(scheme=SCHEME_UPWIND, t_end=1.0)
        xs, ys = grid.node_mesh()
        rho = np.hypot(xs, ys)
        ramp = np.cos(np.pi * np.clip((rho - 0.5) / 1.5, 0.0, 1.0))
        lower = 0.4 * ramp
        upper = lower + 0.3 + 0.2 * ramp
        state_lo = SolverState(grid, theta, forcing, lower, params)
        state_hi = SolverState(grid, theta, forcing, upper, params)
        dt = stable_dt(state_lo)
        active = grid.classification > 0
        worst = np.inf
        for _ in range(500):
            step(state_lo, dt)
            step(state_hi, dt)
            gap = state_hi.u[active] - state_lo.u[active]
            worst = min(worst, float(gap.min()))
        ok = worst >= -1e-10
        detail = f"min nodewise gap over 500 steps {worst:.3e}"
        return CriterionResult(7, "comparison_ordering_preserved", ok, detail)

    def circulation_quadrature(self) -> CriterionResult:
        centers = (SpiralCenter(-0.8, 0.0, 1), SpiralCenter(0.8, 0.0, -1))
        angles = np.linspace(0.0, 2.0 * np.pi, 10001)
        worst = 0.0
        for cx, m in ((-0.8, 1), (0.8, -1)):
            loop = np.stack([cx + 0.45 * np.cos(angles), 0.45 * np.sin(angles)],
                            axis=-1)
            got = circulation(centers, loop)
            worst = max(worst, abs(got - 2.0 * np.pi * m))
        far = np.stack([0.1 * np.cos(angles), 1.5 + 0.1 * np.sin(angles)], axis=-1)
        worst = max(worst, abs(circulation(centers, far)))
        ok = worst <= 1e-6
        detail = f"max |circulation error| {worst:.3e} at 1e4 segments"
        return CriterionResult(8, "phase_circulation", ok, detail)

    def height_reconstruction(self) -> CriterionResult:
        result = self.scenario_run("annulus_constant")
        grid, theta = result.grid, result.theta
        active = grid.classification > 0
        h0 = 1.0
        cap = sandwich_constant(theta, h0)
        exact = True
        slack = np.inf
        for t, u in result.snapshots:
            k = winding_index(u, theta)
            res = (u - theta.theta - 2.0 * np.pi * k)[active]
            exact = exact and bool(np.all(res >= -np.pi) and np.all(res < np.pi))
            if t <= 0.0:
                continue
            z = height(u, theta, h0)
            S = float(u[active].max())
            gap = abs(z[active].max() / t - (h0 / (2.0 * np.pi)) * S / t)
            slack = min(slack, cap / t - gap)
        ok = exact and slack >= 0.0
        detail = f"residual range exact: {exact}, min sandwich slack {slack:.4f}"
        return CriterionResult(9, "height_reconstruction_sandwich", ok, detail)

    def lipschitz_regime(self) -> CriterionResult:
        result = self.scenario_run("lipschitz_regime")
        diag = result.diagnostics
        ts = np.asarray(diag.t)
        grads = np.asarray(diag.sup_grad)
        uts = np.asarray(diag.sup_ut)
        sel = ts >= 1.0
        ref = grads[sel][0]
        grad_ok = bool(np.all(grads[sel] <= 2.0 * ref))
        ut_ok = bool(np.all(uts <= diag.M * (1.0 + 1e-9)))
        ok = grad_ok and ut_ok
        detail = (f"sup|Du| max {grads[sel].max():.3f} vs 2x ref {2 * ref:.3f}; "
                  f"sup|u_t| max {uts.max():.3f} vs M {diag.M:.3f}")
        return CriterionResult(10, "lipschitz_gradient_regime", ok, detail)

    def spiral_extraction(self) -> CriterionResult:
        result = self.scenario_run("annulus_constant")
        grid, theta = result.grid, result.theta
        zero = np.zeros((grid.nx, grid.ny))
        curves = extract_spirals(zero, theta, grid, t=0.0)
        pts = np.concatenate([c.points for c in curves], axis=0)
        seg = np.stack([np.linspace(0.5, 2.0, 400), np.zeros(400)], axis=-1)
        d_seg = hausdorff_distance(pts, seg)
        seg_ok = d_seg <= grid.h

        rot = self.rotating_run(1.0 / 64.0)
        t0, u_t0 = rot.snapshots[0]
        t1, u_t1 = rot.snapshots[-1]
        c0_curves = extract_spirals(u_t0, rot.theta, rot.grid, t=t0)
        c1_curves = extract_spirals(u_t1, rot.theta, rot.grid, t=t1)
        p0 = np.concatenate([c.points for c in c0_curves], axis=0)
        p1 = np.concatenate([c.points for c in c1_curves], axis=0)
        ang = 1.0 * (t1 - t0)
        rot_mat = np.array([[np.cos(ang), -np.sin(ang)], [np.sin(ang), np.cos(ang)]])
        d_rot = hausdorff_distance(p1, p0 @ rot_mat.T)
        rot_ok = d_rot <= 2.0 * rot.grid.h
        ok = seg_ok and rot_ok
        detail = (f"segment Hausdorff {d_seg:.4f} (cap {grid.h:.4f}), rotated "
                  f"Hausdorff {d_rot:.4f} (cap {2 * rot.grid.h:.4f})")
        return CriterionResult(11, "spiral_extraction_matches", ok, detail)

    def determinism(self) -> CriterionResult:
        blobs = []
        for _ in range(2):
            result = run_scenario(catalog()["annulus_constant"], t_end=0.5)
            blobs.append(output.diagnostics_csv_text(result.diagnostics))
        ok = blobs[0] == blobs[1]
        detail = f"diagnostics byte-identical across repeat runs: {ok}"
        return CriterionResult(12, "deterministic_diagnostics", ok, detail)

    def run_all(self) -> list[CriterionResult]:
        checks = (self.rotating_convergence, self.radial_growth_rate,
                  self.constant_growth_bracket, self.margin_arithmetic,
                  self.inactive_pair_plateau, self.barrier_invariant,
                  self.comparison_principle, self.circulation_quadrature,
                  self.height_reconstruction, self.lipschitz_regime,
                  self.spiral_extraction, self.determinism)
        results = []
        for check in checks:
            res = check()
            self._note(res.line())
            results.append(res)
        return results
