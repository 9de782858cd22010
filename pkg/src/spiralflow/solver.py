"""Explicit level-set evolution with Neumann ghost boundaries.

The evolved unknown u lives on grid nodes; v = u - theta drives both the
anisotropic (projection-tensor) diffusion and the forcing magnitude in

    u_t = tr[(I - Dv (x) Dv / (eps^2 + |Dv|^2)) D^2 v] + c(x) sqrt(eps^2 + |Dv|^2).

Differencing is central for the diffusion; the forcing gradient is either
central or Godunov-upwinded on Du shifted by the analytic phase gradient.
Time stepping is forward Euler at a fixed stability-limited dt.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
import numba

from . import kernels
from .errors import Blowup, NumericalFailure, NotReady
from .forcing import Forcing
from .geometry import Grid
from .theta import ThetaField

SCHEME_CENTRAL = "central"
SCHEME_UPWIND = "upwind"

# Lipschitz allowances in the stability bound: the diffusion coefficient of
# the nondivergence form is at most 1; the forcing speed responds to each
# one-sided difference with slope at most c(x) per axis.
_DIFFUSION_BOUND = 1.0
_FORCING_SPEED_BOUND = 2.0


def _configure_threads() -> None:
    raw = os.environ.get("SPIRALFLOW_THREADS")
    if not raw:
        return
    try:
        want = int(raw)
    except ValueError as exc:
        raise ValueError(f"SPIRALFLOW_THREADS must be an integer, got {raw!r}") from exc
    limit = numba.config.NUMBA_NUM_THREADS
    numba.set_num_threads(max(1, min(want, limit)))


@dataclass
class SolverParams:
    epsilon: float = 1e-2
    cfl: float = 0.9
    t_end: float = 1.0
    snapshot_stride: int = 50
    scheme: str = SCHEME_UPWIND

    def __post_init__(self):
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")
        if self.epsilon <= 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.t_end < 0.0:
            raise ValueError(f"t_end must be nonnegative, got {self.t_end}")
        if self.snapshot_stride < 1:
            raise ValueError("snapshot_stride must be a positive step count")
        if self.scheme not in (SCHEME_CENTRAL, SCHEME_UPWIND):
            raise ValueError(f"scheme must be 'central' or 'upwind', got {self.scheme!r}")


@dataclass
class Diagnostics:
    """Scalar time series sampled on the snapshot stride."""

    t: list = field(default_factory=list)
    S: list = field(default_factory=list)
    min_u: list = field(default_factory=list)
    sup_grad: list = field(default_factory=list)
    sup_ut: list = field(default_factory=list)
    M: float = 0.0
    u0_sup: float = 0.0
    barrier_violation: float = 0.0

    def s_over_t(self) -> np.ndarray:
        ts = np.asarray(self.t)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(ts > 0, np.asarray(self.S) / ts, np.nan)

    def rows(self):
        sot = self.s_over_t()
        for k in range(len(self.t)):
            yield (self.t[k], self.S[k], self.min_u[k], self.sup_grad[k],
                   self.sup_ut[k], sot[k])


class SolverState:
    """Grid fields plus everything precomputed for the stepping kernels."""

    def __init__(self, grid: Grid, theta: ThetaField, forcing: Forcing,
                 u0: np.ndarray, params: SolverParams):
        _configure_threads()
        self.grid = grid
        self.theta = theta
        self.forcing = forcing
        self.params = params
        self.scheme_upwind = params.scheme == SCHEME_UPWIND

        self.c_nodes = np.ascontiguousarray(forcing.node_values(grid))
        if np.any(self.c_nodes[grid.classification != 0] < 0.0):
            raise ValueError("forcing must be nonnegative on the domain")
        self.u = np.ascontiguousarray(np.array(u0, dtype=float))
        if self.u.shape != (grid.nx, grid.ny):
            raise ValueError(f"u0 shaped {self.u.shape}, expected {(grid.nx, grid.ny)}")
        self.u[grid.classification == 0] = 0.0
        self._u_next = self.u.copy()

        # Source term of the ghost fill: span * (Dtheta(foot) . n).
        g = theta.grad_at(grid.ghost_foot) if len(grid.ghost_foot) else np.zeros((0, 2))
        slope = g[:, 0] * grid.ghost_normal[:, 0] + g[:, 1] * grid.ghost_normal[:, 1]
        self.ghost_src = np.ascontiguousarray(grid.ghost_span * slope)
        self._ghost_flat = np.ascontiguousarray(grid.ghost_flat())
        self._active_flat = grid.active_flat()

        self.t = 0.0
        self.steps = 0
        self.last_sup_ut = 0.0
        apply_neumann_bc(self)
        self.u0 = self.u.copy()
        self.u0_sup = float(np.abs(self.u.ravel()[self._active_flat]).max())

        ii, jj = grid.interior_i, grid.interior_j
        hess_sup = kernels.hessian_sup_kernel(self.u, ii, jj, theta.hxx, theta.hxy, grid.h)
        gx = (self.u[ii + 1, jj] - self.u[ii - 1, jj]) / (2 * grid.h) - theta.gx[ii, jj]
        gy = (self.u[ii, jj + 1] - self.u[ii, jj - 1]) / (2 * grid.h) - theta.gy[ii, jj]
        forcing_sup = float((np.sqrt(1.0 + gx**2 + gy**2) * self.c_nodes[ii, jj]).max())
        self.M = 4.0 * float(hess_sup) + forcing_sup
        self.c_max = float(self.c_nodes[ii, jj].max())

    def active_values(self) -> np.ndarray:
        return self.u.ravel()[self._active_flat]

    def barrier_excess(self) -> float:
        """Worst overshoot of the corridor u0 -+ M t over active nodes (>=0)."""
        vals = self.active_values()
        base = self.u0.ravel()[self._active_flat]
        slack = self.M * self.t
        over = float((vals - base).max() - slack)
        under = float((base - vals).max() - slack)
        return max(0.0, over, under)


def apply_neumann_bc(state: SolverState) -> None:
    """Refresh ghost values: u_ghost = u(probe) + span * (Dtheta(foot) . n)."""
    kernels.fill_ghosts(state.u.ravel(), state._ghost_flat,
                        state.grid.ghost_corners, state.grid.ghost_weights,
                        state.ghost_src)


def rhs(state: SolverState) -> np.ndarray:
    """Discrete right-hand side on interior nodes (zero elsewhere)."""
    apply_neumann_bc(state)
    out = np.zeros_like(state.u)
    kernels.rhs_kernel(state.u, out, state.grid.interior_i, state.grid.interior_j,
                       state.theta.gx, state.theta.gy, state.theta.hxx, state.theta.hxy,
                       state.c_nodes, state.params.epsilon**2, state.grid.h,
                       state.scheme_upwind)
    return out


def stable_dt(state: SolverState) -> float:
    """cfl * min(parabolic bound h^2/4, advective bound h / (2 c_max))."""
    h = state.grid.h
    dt = h * h / (4.0 * _DIFFUSION_BOUND)
    if state.c_max > 0.0:
        dt = min(dt, h / (state.c_max * _FORCING_SPEED_BOUND))
    return state.params.cfl * dt


def step(state: SolverState, dt: float | None = None) -> None:
    """One forward-Euler step; refuses dt above the stability bound."""
    limit = stable_dt(state)
    if dt is None:
        dt = limit
    elif dt > limit * (1.0 + 1e-12):
        raise ValueError(f"dt = {dt} exceeds stable_dt = {limit}")
    if dt == 0.0:
        return
    apply_neumann_bc(state)
    sup_rhs, sup_u = kernels.step_kernel(
        state.u, state._u_next, state.grid.interior_i, state.grid.interior_j,
        state.theta.gx, state.theta.gy, state.theta.hxx, state.theta.hxy,
        state.c_nodes, state.params.epsilon**2, state.grid.h, dt,
        state.scheme_upwind)
    if not np.isfinite(sup_rhs):
        raise NumericalFailure(f"non-finite update at t = {state.t}")
    state.u, state._u_next = state._u_next, state.u
    state.t += dt
    state.steps += 1
    state.last_sup_ut = float(sup_rhs)
    bound = state.u0_sup + 2.0 * state.M * state.t
    if sup_u > bound + 1e-9 * (1.0 + bound):
        raise Blowup(f"|u| reached {sup_u:.6g} at t = {state.t:.6g}, "
                     f"barrier allows {bound:.6g}")


@dataclass
class RunResult:
    grid: Grid
    theta: ThetaField
    forcing: Forcing
    params: SolverParams
    diagnostics: Diagnostics
    snapshots: list          # [(t, u array copy), ...]
    state: SolverState


def run(grid: Grid, theta: ThetaField, forcing: Forcing, u0: np.ndarray,
        params: SolverParams, snapshot_times=None) -> RunResult:
    """March to t_end, sampling diagnostics on the stride.

    ``snapshot_times`` lists model times at which full fields are kept
    (t = 0 and t_end are always included).  Returns every snapshot in
    chronological order together with the sampled diagnostics.
    """
    state = SolverState(grid, theta, forcing, u0, params)
    diag = Diagnostics(M=state.M, u0_sup=state.u0_sup)

    wanted = set()
    if snapshot_times is not None:
        for s in snapshot_times:
            if 0.0 < s < params.t_end:
                wanted.add(float(s))
    pending = sorted(wanted)

    state.last_sup_ut = float(np.abs(rhs(state)[grid.classification == 1]).max()) \
        if grid.n_interior else 0.0
    snapshots = [(0.0, state.u.copy())]
    _record(state, diag)

    while state.t < params.t_end - 1e-14:
        dt = min(stable_dt(state), params.t_end - state.t)
        if pending:
            dt = min(dt, pending[0] - state.t)
        step(state, dt)
        at_sample = state.steps % params.snapshot_stride == 0
        at_snapshot = bool(pending) and state.t >= pending[0] - 1e-14
        if at_snapshot:
            pending.pop(0)
        if at_sample or at_snapshot or state.t >= params.t_end - 1e-14:
            apply_neumann_bc(state)
            _record(state, diag)
            if at_snapshot or state.t >= params.t_end - 1e-14:
                snapshots.append((state.t, state.u.copy()))

    return RunResult(grid=grid, theta=theta, forcing=forcing, params=params,
                     diagnostics=diag, snapshots=snapshots, state=state)


def _record(state: SolverState, diag: Diagnostics) -> None:
    vals = state.active_values()
    if not np.all(np.isfinite(vals)):
        raise NumericalFailure(f"non-finite field at t = {state.t}")
    diag.t.append(state.t)
    diag.S.append(float(vals.max()))
    diag.min_u.append(float(vals.min()))
    diag.sup_grad.append(float(kernels.sup_grad_kernel(
        state.u, state.grid.interior_i, state.grid.interior_j, state.grid.h)))
    diag.sup_ut.append(state.last_sup_ut)
    scale = 1.0 + state.M * state.t
    diag.barrier_violation = max(diag.barrier_violation, state.barrier_excess() / scale)


def neumann_residual(state: SolverState) -> float:
    """Independent check of the boundary condition.

    Differences u between two strictly interior points on each boundary
    normal (bilinear off-node values, no ghost-fill stencil reuse) and
    compares with the analytic phase slope at their midpoint.  For fields
    compatible with D(u - theta) . n = 0 this is first-order small.
    """
    grid = state.grid
    if len(grid.ghost_foot) == 0:
        raise NotReady("grid has no boundary nodes")
    apply_neumann_bc(state)
    h = grid.h
    near = grid.ghost_foot - 0.5 * h * grid.ghost_normal
    deep = grid.ghost_foot - 1.5 * h * grid.ghost_normal
    du_n = (_sample(state.u, grid, near) - _sample(state.u, grid, deep)) / h
    g = state.theta.grad_at(grid.ghost_foot - h * grid.ghost_normal)
    slope = g[:, 0] * grid.ghost_normal[:, 0] + g[:, 1] * grid.ghost_normal[:, 1]
    return float(np.abs(du_n - slope).max())


def _sample(u: np.ndarray, grid: Grid, points: np.ndarray) -> np.ndarray:
    gx = (points[:, 0] - grid.origin[0]) / grid.h
    gy = (points[:, 1] - grid.origin[1]) / grid.h
    ix = np.clip(np.floor(gx).astype(int), 0, grid.nx - 2)
    iy = np.clip(np.floor(gy).astype(int), 0, grid.ny - 2)
    fx = gx - ix
    fy = gy - iy
    return ((1 - fx) * (1 - fy) * u[ix, iy] + fx * (1 - fy) * u[ix + 1, iy]
            + (1 - fx) * fy * u[ix, iy + 1] + fx * fy * u[ix + 1, iy + 1])
