"""Multivalued phase field generated by a set of weighted spiral centers.

The phase attached to centers a_j with integer strengths m_j is
theta(x) = sum_j m_j * arg(x - a_j).  The function itself is multivalued,
but its gradient is a smooth single-valued vector field away from the
centers, and the principal branch (each argument reduced to [0, 2*pi))
is what enters height reconstruction and curve extraction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularPoint

# Distance below which a query point is considered to sit on a center.
SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class SpiralCenter:
    """One spiral center: position and signed integer strength."""

    x: float
    y: float
    strength: int

    def position(self) -> np.ndarray:
        return np.array([self.x, self.y])


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.shape[-1] != 2:
        raise ValueError(f"points must have trailing dimension 2, got shape {pts.shape}")
    return pts


def _check_not_singular(pts: np.ndarray, centers) -> None:
    for c in centers:
        d2 = (pts[..., 0] - c.x) ** 2 + (pts[..., 1] - c.y) ** 2
        if np.any(d2 < SINGULAR_TOL**2):
            raise SingularPoint(f"evaluation point within {SINGULAR_TOL} of center ({c.x}, {c.y})")


def grad_theta(points, centers) -> np.ndarray:
    """Gradient of the phase: sum_j m_j * (x - a_j)^perp / |x - a_j|^2.

    Here v^perp = (-v2, v1).  Single-valued and smooth away from the
    centers.  Raises SingularPoint if a query point coincides with a
    center within 1e-12.
    """
    pts = _as_points(points)
    _check_not_singular(pts, centers)
    out = np.zeros_like(pts)
    for c in centers:
        dx = pts[..., 0] - c.x
        dy = pts[..., 1] - c.y
        rho2 = dx * dx + dy * dy
        out[..., 0] += c.strength * (-dy) / rho2
        out[..., 1] += c.strength * dx / rho2
    return out


def hessian_theta(points, centers) -> tuple[np.ndarray, np.ndarray]:
    """Second derivatives (theta_xx, theta_xy) of the phase.

    The phase is harmonic away from the centers, so theta_yy = -theta_xx.
    """
    pts = _as_points(points)
    _check_not_singular(pts, centers)
    hxx = np.zeros(pts.shape[:-1])
    hxy = np.zeros(pts.shape[:-1])
    for c in centers:
        dx = pts[..., 0] - c.x
        dy = pts[..., 1] - c.y
        rho4 = (dx * dx + dy * dy) ** 2
        hxx += c.strength * 2.0 * dx * dy / rho4
        hxy += c.strength * (dy * dy - dx * dx) / rho4
    return hxx, hxy


def principal_theta(points, centers) -> np.ndarray:
    """Principal branch sum_j m_j * Theta_j with each Theta_j in [0, 2*pi)."""
    pts = _as_points(points)
    _check_not_singular(pts, centers)
    out = np.zeros(pts.shape[:-1])
    two_pi = 2.0 * np.pi
    for c in centers:
        ang = np.arctan2(pts[..., 1] - c.y, pts[..., 0] - c.x)
        ang = np.mod(ang, two_pi)
        out += c.strength * ang
    return out


def circulation(centers, loop) -> float:
    """Line integral of grad_theta along a closed polyline (midpoint rule).

    ``loop`` is an (N, 2) array of vertices; the segment from the last
    vertex back to the first is implied.  Returns a value close to
    2*pi times the total enclosed strength.  Raises SingularPoint when
    the loop passes a center at a distance comparable to the segment
    length, where the quadrature loses meaning.
    """
    verts = _as_points(loop)
    if verts.ndim != 2 or len(verts) < 3:
        raise ValueError("loop must be an (N, 2) array with N >= 3")
    nxt = np.roll(verts, -1, axis=0)
    mids = 0.5 * (verts + nxt)
    segs = nxt - verts
    seg_len = np.hypot(segs[:, 0], segs[:, 1])
    max_len = float(seg_len.max())
    for c in centers:
        d = np.hypot(mids[:, 0] - c.x, mids[:, 1] - c.y)
        if np.any(d < max_len):
            raise SingularPoint(
                f"loop approaches center ({c.x}, {c.y}) closer than the segment length"
            )
    g = grad_theta(mids, centers)
    return float(np.sum(g[:, 0] * segs[:, 0] + g[:, 1] * segs[:, 1]))


class ThetaField:
    """Per-node caches of the phase and its derivatives on a grid.

    Centers are static over a run, so the principal branch, gradient and
    Hessian are evaluated once.  Values are only meaningful on nodes the
    solver reads (interior and boundary); far-exterior nodes are zeroed.
    """

    def __init__(self, grid, centers):
        self.grid = grid
        self.centers = tuple(centers)
        xs, ys = grid.node_mesh()
        pts = np.stack([xs, ys], axis=-1)
        needed = grid.classification != 0
        # Guard: every node the solver touches must stay clear of the centers.
        for c in self.centers:
            d = np.hypot(xs[needed] - c.x, ys[needed] - c.y)
            if d.size and d.min() < 1e-9:
                raise SingularPoint(
                    f"grid node within 1e-9 of spiral center ({c.x}, {c.y})"
                )
        # Exterior nodes may sit arbitrarily close to (or on) a center; give
        # them a harmless fake offset so the vectorized evaluation stays finite.
        safe = pts.copy()
        for c in self.centers:
            dx = safe[..., 0] - c.x
            dy = safe[..., 1] - c.y
            on_center = (dx * dx + dy * dy) < 1e-18
            safe[..., 0][on_center] += 1.0
        self.theta = principal_theta(safe, self.centers)
        g = grad_theta(safe, self.centers)
        self.gx = g[..., 0]
        self.gy = g[..., 1]
        self.hxx, self.hxy = hessian_theta(safe, self.centers)
        for arr in (self.theta, self.gx, self.gy, self.hxx, self.hxy):
            arr[~needed] = 0.0
            arr.setflags(write=False)

    def grad_at(self, points) -> np.ndarray:
        """Analytic gradient at arbitrary points (not cached)."""
        return grad_theta(points, self.centers)

    def principal_at(self, points) -> np.ndarray:
        """Analytic principal branch at arbitrary points (not cached)."""
        return principal_theta(points, self.centers)

    def total_strength(self) -> int:
        return int(sum(abs(c.strength) for c in self.centers))
