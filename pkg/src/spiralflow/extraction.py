"""Spiral curve extraction from the phase residual of a level-set field.

The spiral at time t is the zero set of sin(u - Theta) restricted to where
cos(u - Theta) > 0; working with the sine/cosine pair instead of u - Theta
itself avoids branch cuts of the principal phase.  Crossings are located by
marching squares with linear interpolation on cell edges and chained into
polylines via shared-edge identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegenerateLevelSet
from .geometry import Grid, INTERIOR
from .theta import ThetaField

FLAT_TOL = 1e-9
FLAT_FRACTION = 0.10

# Segment table indexed by the 4-bit corner sign pattern; edges are
# B(ottom), R(ight), T(op), L(eft).  The two ambiguous saddle patterns
# (5 and 10) are resolved by the cell-center value at runtime.
_CASES = {
    1: [("L", "B")], 2: [("B", "R")], 3: [("L", "R")], 4: [("T", "R")],
    6: [("B", "T")], 7: [("L", "T")], 8: [("L", "T")], 9: [("B", "T")],
    11: [("T", "R")], 12: [("L", "R")], 13: [("B", "R")], 14: [("L", "B")],
}


@dataclass
class SpiralCurve:
    points: np.ndarray  # (N, 2)
    t: float
    closed: bool


def phase_residual(u: np.ndarray, theta: ThetaField) -> tuple[np.ndarray, np.ndarray]:
    """(sin, cos) of u - Theta, single-valued on the grid."""
    d = u - theta.theta
    return np.sin(d), np.cos(d)


def extract_spirals(u: np.ndarray, theta: ThetaField, grid: Grid,
                    t: float = 0.0) -> list[SpiralCurve]:
    """Trace the spiral arms of ``u`` as polylines clipped to the domain.

    Raises DegenerateLevelSet when the phase residual vanishes on more
    than 10% of the interior (the zero set is then area-like and no curve
    is meaningful).
    """
    s, c = phase_residual(u, theta)
    interior = grid.classification == INTERIOR
    flat = np.count_nonzero((np.abs(s) < FLAT_TOL) & (c > 0.0) & interior)
    n_int = int(np.count_nonzero(interior))
    if n_int and flat / n_int > FLAT_FRACTION:
        raise DegenerateLevelSet(
            f"phase residual vanishes on {flat}/{n_int} interior nodes")

    valid = grid.classification != 0
    cell_ok = valid[:-1, :-1] & valid[1:, :-1] & valid[1:, 1:] & valid[:-1, 1:]
    pos = s > 0.0
    case = (pos[:-1, :-1].astype(np.int8) | (pos[1:, :-1] << 1)
            | (pos[1:, 1:] << 2) | (pos[:-1, 1:] << 3))
    ci, cj = np.nonzero(cell_ok & (case > 0) & (case < 15))

    h = grid.h
    ox, oy = grid.origin
    segments = []  # (key_a, key_b, point_a, point_b)

    def edge_point(i, j, edge):
        if edge == "B":
            sa, sb = s[i, j], s[i + 1, j]
            frac = sa / (sa - sb)
            return ("H", i, j), (ox + (i + frac) * h, oy + j * h)
        if edge == "T":
            sa, sb = s[i, j + 1], s[i + 1, j + 1]
            frac = sa / (sa - sb)
            return ("H", i, j + 1), (ox + (i + frac) * h, oy + (j + 1) * h)
        if edge == "L":
            sa, sb = s[i, j], s[i, j + 1]
            frac = sa / (sa - sb)
            return ("V", i, j), (ox + i * h, oy + (j + frac) * h)
        sa, sb = s[i + 1, j], s[i + 1, j + 1]
        frac = sa / (sa - sb)
        return ("V", i + 1, j), (ox + (i + 1) * h, oy + (j + frac) * h)

    for i, j in zip(ci.tolist(), cj.tolist()):
        code = int(case[i, j])
        if code == 5 or code == 10:
            center = 0.25 * (s[i, j] + s[i + 1, j] + s[i, j + 1] + s[i + 1, j + 1])
            if code == 5:
                pairs = [("B", "R"), ("L", "T")] if center > 0 else [("L", "B"), ("T", "R")]
            else:
                pairs = [("L", "B"), ("T", "R")] if center > 0 else [("B", "R"), ("L", "T")]
        else:
            pairs = _CASES[code]
        for ea, eb in pairs:
            key_a, pt_a = edge_point(i, j, ea)
            key_b, pt_b = edge_point(i, j, eb)
            mx = 0.5 * (pt_a[0] + pt_b[0])
            my = 0.5 * (pt_b[1] + pt_a[1])
            if _bilinear_at(c, grid, mx, my) <= 0.0:
                continue
            segments.append((key_a, key_b, pt_a, pt_b))

    return _chain(segments, grid, t)


def _bilinear_at(field: np.ndarray, grid: Grid, x: float, y: float) -> float:
    gx = (x - grid.origin[0]) / grid.h
    gy = (y - grid.origin[1]) / grid.h
    ix = min(max(int(np.floor(gx)), 0), grid.nx - 2)
    iy = min(max(int(np.floor(gy)), 0), grid.ny - 2)
    fx, fy = gx - ix, gy - iy
    return ((1 - fx) * (1 - fy) * field[ix, iy] + fx * (1 - fy) * field[ix + 1, iy]
            + (1 - fx) * fy * field[ix, iy + 1] + fx * fy * field[ix + 1, iy + 1])


def _chain(segments, grid: Grid, t: float) -> list[SpiralCurve]:
    adjacency: dict = {}
    coords: dict = {}
    for idx, (ka, kb, pa, pb) in enumerate(segments):
        coords[ka] = pa
        coords[kb] = pb
        adjacency.setdefault(ka, []).append((idx, kb))
        adjacency.setdefault(kb, []).append((idx, ka))

    used = np.zeros(len(segments), dtype=bool)
    curves = []

    def walk(start_key):
        chain = [start_key]
        key = start_key
        while True:
            nxt = None
            for idx, other in adjacency[key]:
                if not used[idx]:
                    used[idx] = True
                    nxt = other
                    break
            if nxt is None:
                return chain
            chain.append(nxt)
            key = nxt

    open_starts = sorted((k for k, links in adjacency.items() if len(links) == 1),
                         key=lambda k: (k[0], k[1], k[2]))
    for start in open_starts:
        if all(used[idx] for idx, _ in adjacency[start]):
            continue
        chain = walk(start)
        curves.append((chain, False))
    for idx in range(len(segments)):
        if used[idx]:
            continue
        used[idx] = True
        ka, kb = segments[idx][0], segments[idx][1]
        chain = [ka] + walk(kb)
        closed = chain[0] == chain[-1]
        curves.append((chain, closed))

    out = []
    for chain, closed in curves:
        pts = np.array([coords[k] for k in chain], dtype=float)
        pts = _dedupe(_clip_points(pts, grid))
        if len(pts) >= 2:
            out.append(SpiralCurve(points=pts, t=t, closed=closed))
    return out


def _dedupe(pts: np.ndarray) -> np.ndarray:
    """Drop consecutive points that collapsed onto each other after clipping."""
    if len(pts) < 2:
        return pts
    gaps = np.hypot(*(np.diff(pts, axis=0).T))
    keep = np.concatenate([[True], gaps > 1e-10])
    return pts[keep]


def _clip_points(pts: np.ndarray, grid: Grid) -> np.ndarray:
    """Project slightly-outside points onto the boundary circles or strip edge."""
    pts = pts.copy()
    domain = grid.domain
    if domain is None:
        return pts
    keep = np.ones(len(pts), dtype=bool)
    for n, p in enumerate(pts):
        moved = p
        if grid.outer_disks:
            d_out = max(d.radius - np.hypot(p[0] - d.center[0], p[1] - d.center[1])
                        for d in grid.outer_disks)
            if d_out < 0.0:
                best = max(grid.outer_disks,
                           key=lambda d: d.radius - np.hypot(p[0] - d.center[0], p[1] - d.center[1]))
                v = p - np.asarray(best.center)
                moved = np.asarray(best.center) + v * (best.radius / np.hypot(v[0], v[1]))
        else:
            rho = np.hypot(p[0], p[1])
            if rho > domain.outer_radius:
                moved = p * (domain.outer_radius / rho)
        for hole in domain.holes:
            v = moved - np.asarray(hole.center)
            rho = np.hypot(v[0], v[1])
            if rho < hole.radius:
                if rho < 1e-12:
                    keep[n] = False
                    break
                moved = np.asarray(hole.center) + v * (hole.radius / rho)
        if grid.strip is not None:
            qx = abs(moved[0]) - grid.strip.x_half
            qy = abs(moved[1]) - grid.strip.y_half
            if qx < 0.0 and qy < 0.0:
                if qx > qy:
                    moved = np.array([np.sign(moved[0]) * grid.strip.x_half, moved[1]])
                else:
                    moved = np.array([moved[0], np.sign(moved[1]) * grid.strip.y_half])
        pts[n] = moved
    return pts[keep]


def hausdorff_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric point-set Hausdorff distance between two sampled curves."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d_ab = cKDTree(b).query(a)[0].max()
    d_ba = cKDTree(a).query(b)[0].max()
    return float(max(d_ab, d_ba))


def resample_polyline(pts: np.ndarray, spacing: float) -> np.ndarray:
    """Evenly spaced samples along a polyline (used for curve comparisons)."""
    pts = np.asarray(pts, dtype=float)
    seg = np.diff(pts, axis=0)
    lengths = np.hypot(seg[:, 0], seg[:, 1])
    arclen = np.concatenate([[0.0], np.cumsum(lengths)])
    total = arclen[-1]
    if total == 0.0:
        return pts[:1]
    n = max(2, int(np.ceil(total / spacing)) + 1)
    targets = np.linspace(0.0, total, n)
    out = np.empty((n, 2))
    out[:, 0] = np.interp(targets, arclen, pts[:, 0])
    out[:, 1] = np.interp(targets, arclen, pts[:, 1])
    return out
