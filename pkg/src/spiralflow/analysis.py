"""Growth-rate estimation, closed-form bounds, and height reconstruction."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import HypothesisViolated, InsufficientData
from .forcing import Forcing
from .geometry import DomainSpec
from .solver import SolverState, rhs
from .theta import ThetaField

TWO_PI = 2.0 * np.pi


def winding_index(u: np.ndarray, theta: ThetaField) -> np.ndarray:
    """Integer sheet count k with u - Theta - 2*pi*k in [-pi, pi)."""
    return np.floor((u - theta.theta + np.pi) / TWO_PI).astype(np.int64)


def height(u: np.ndarray, theta: ThetaField, h0: float) -> np.ndarray:
    """Step height (h0 / 2*pi) * (Theta + 2*pi*k + pi * sign residual).

    The residual sign at exactly zero counts as positive, so a node lying
    on the current spiral arm is assigned the upper terrace.
    """
    k = winding_index(u, theta)
    res = u - theta.theta - TWO_PI * k
    sgn = np.where(res >= 0.0, 1.0, -1.0)
    return (h0 / TWO_PI) * (theta.theta + TWO_PI * k + np.pi * sgn)


def sandwich_constant(theta: ThetaField, h0: float) -> float:
    """Constant (2*pi + h0) * (sum |m_j| + 1) bounding |max h - (h0/2pi) max u|."""
    return (TWO_PI + h0) * (theta.total_strength() + 1)


@dataclass
class GrowthSeries:
    """Samples of the running maximum S(t) = max u(., t)."""

    t: np.ndarray
    S: np.ndarray
    u0_sup: float

    @staticmethod
    def from_diagnostics(diag) -> "GrowthSeries":
        return GrowthSeries(np.asarray(diag.t, dtype=float),
                            np.asarray(diag.S, dtype=float),
                            float(diag.u0_sup))


def _final_half_slope(t: np.ndarray, y: np.ndarray) -> float:
    cut = 0.5 * (t[0] + t[-1])
    sel = t >= cut
    if np.count_nonzero(sel) < 2:
        raise InsufficientData("need at least two samples in the final half")
    return float(np.polyfit(t[sel], y[sel], 1)[0])


def growth_rate(series: GrowthSeries) -> tuple[float, float]:
    """Two asymptotic growth speed estimates: (slope, fekete).

    ``slope`` is the least-squares slope of S(t) over the final half of the
    series.  ``fekete`` is min over samples of (S(t) + sup|u0|) / t, a
    certified upper bound on the limit speed by subadditivity of
    S(t) + sup|u0|.
    """
    if len(series.t) < 2:
        raise InsufficientData("need at least two growth samples")
    slope = _final_half_slope(series.t, series.S)
    positive = series.t > 0.0
    if not np.any(positive):
        raise InsufficientData("no samples at positive time")
    fekete = float(np.min((series.S[positive] + series.u0_sup) / series.t[positive]))
    return slope, fekete


def growth_bounds(domain: DomainSpec, c, grid=None) -> tuple[float, float]:
    """Closed-form bracket [min c/|x|, max c/|x|] for the growth speed.

    Only valid for a single strength-one spiral centered at the origin
    (the divergence of the rotated unit radial field vanishes there, which
    is what makes translates of the phase super/subsolutions).
    """
    if len(domain.holes) != 1:
        raise HypothesisViolated("growth bounds need exactly one spiral center")
    hole = domain.holes[0]
    if math.hypot(*hole.center) > 1e-12 or hole.strength != 1:
        raise HypothesisViolated("growth bounds need a strength-one center at the origin")
    r, R = hole.radius, domain.outer_radius
    if isinstance(c, Forcing):
        if c.kind == "constant":
            return c.value / R, c.value / r
        if c.kind == "radial":
            return c.value, c.value
        if grid is None:
            raise HypothesisViolated("gridded forcing needs a grid for the bounds")
        xs, ys = grid.node_mesh()
        sel = grid.classification == 1
        ratio = c.node_values(grid)[sel] / np.hypot(xs[sel], ys[sel])
        return float(ratio.min()), float(ratio.max())
    v = float(c)
    return v / R, v / r


def ergodic_residual(state: SolverState, sc_est: float) -> float:
    """sup over interior of |discrete operator - sc_est| on the current field.

    Near the long-time rotating regime the field u - sc_est * t is steady,
    so this residual measures distance from the ergodic limit equation.
    """
    values = rhs(state)[state.grid.classification == 1]
    return float(np.abs(values - sc_est).max())


def tip_growth_rate(times, tips) -> float:
    """Least-squares slope of the height maximum over the final half."""
    t = np.asarray(times, dtype=float)
    y = np.asarray(tips, dtype=float)
    if len(t) < 2:
        raise InsufficientData("need at least two height snapshots")
    return _final_half_slope(t, y)
