"""Domain description, masked Cartesian grids, and boundary constants.

The working domain W is an outer disk (or a union of disks when a pinched
outer boundary is wanted) with a set of equal-radius circular holes removed,
optionally minus an axis-aligned rectangular strip.  Grids are uniform,
node-centered, and carry a per-node classification plus precomputed
ghost-node reflection data for the Neumann boundary scheme.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDomain, HoleTooSmall, NotOnBoundary
from .forcing import Forcing

# Node classification codes.  Hole j maps to HOLE_BOUNDARY_BASE + j.
EXTERIOR = 0
INTERIOR = 1
OUTER_BOUNDARY = 2
MASK_BOUNDARY = 3
HOLE_BOUNDARY_BASE = 4

# Width of the ghost band outside the boundary, in units of h.
GHOST_BAND = 2.0
_TOL = 1e-9


def hole_code(j: int) -> int:
    """Classification code of the ghost band inside hole j."""
    return HOLE_BOUNDARY_BASE + j


def is_boundary(classification: np.ndarray) -> np.ndarray:
    """Boolean mask of ghost (boundary band) nodes."""
    return classification >= OUTER_BOUNDARY


@dataclass(frozen=True)
class Hole:
    """Circular hole carrying a spiral center of integer strength."""

    center: tuple[float, float]
    radius: float
    strength: int


@dataclass(frozen=True)
class Disk:
    center: tuple[float, float]
    radius: float


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle (-x_half, x_half) x (-y_half, y_half)."""

    x_half: float
    y_half: float

    def contains(self, xs, ys, tol: float = 0.0) -> np.ndarray:
        return (np.abs(xs) < self.x_half - tol) & (np.abs(ys) < self.y_half - tol)


@dataclass(frozen=True)
class DomainSpec:
    """Outer disk of radius ``outer_radius`` minus equal-radius holes.

    Raises DegenerateDomain on construction if the holes are not strictly
    inside the outer disk, overlap each other, have unequal radii, or any
    strength is zero.
    """

    outer_radius: float
    holes: tuple[Hole, ...]

    def __post_init__(self):
        object.__setattr__(self, "holes", tuple(self.holes))
        R = self.outer_radius
        if not (R > 0.0) or not math.isfinite(R):
            raise DegenerateDomain(f"outer radius must be positive, got {R}")
        if len(self.holes) == 0:
            raise DegenerateDomain("at least one hole is required")
        r0 = self.holes[0].radius
        for k, hole in enumerate(self.holes):
            if not (hole.radius > 0.0):
                raise DegenerateDomain(f"hole {k} has non-positive radius")
            if abs(hole.radius - r0) > 1e-12:
                raise DegenerateDomain("all holes must share a single radius")
            if int(hole.strength) != hole.strength or hole.strength == 0:
                raise DegenerateDomain(f"hole {k} strength must be a nonzero integer")
            cx, cy = hole.center
            if math.hypot(cx, cy) + hole.radius >= R - 1e-12:
                raise DegenerateDomain(f"hole {k} is not strictly inside the outer disk")
        for i in range(len(self.holes)):
            for j in range(i + 1, len(self.holes)):
                ci, cj = self.holes[i].center, self.holes[j].center
                if math.hypot(ci[0] - cj[0], ci[1] - cj[1]) <= 2.0 * r0 + 1e-12:
                    raise DegenerateDomain(f"holes {i} and {j} overlap or touch")

    @property
    def hole_radius(self) -> float:
        return self.holes[0].radius


def signed_distance(domain: DomainSpec, points) -> np.ndarray:
    """Signed distance to the boundary of W (positive inside W)."""
    pts = np.asarray(points, dtype=float)
    rho = np.hypot(pts[..., 0], pts[..., 1])
    d = domain.outer_radius - rho
    for hole in domain.holes:
        dj = np.hypot(pts[..., 0] - hole.center[0], pts[..., 1] - hole.center[1])
        d = np.minimum(d, dj - hole.radius)
    return d


def outward_normal(domain: DomainSpec, x, tol: float = 1e-8) -> np.ndarray:
    """Outward unit normal of W at a point on (or within ``tol`` of) the boundary."""
    x = np.asarray(x, dtype=float)
    rho = float(np.hypot(x[0], x[1]))
    best_dist = abs(domain.outer_radius - rho)
    best_normal = x / rho if rho > 0 else np.array([1.0, 0.0])
    for hole in domain.holes:
        v = x - np.asarray(hole.center)
        rj = float(np.hypot(v[0], v[1]))
        dist = abs(rj - hole.radius)
        if dist < best_dist and rj > 0:
            best_dist = dist
            best_normal = -v / rj
    if best_dist > tol:
        raise NotOnBoundary(f"point {x.tolist()} is {best_dist:.3e} from the boundary (tol {tol:.1e})")
    return best_normal


def compute_C0(domain: DomainSpec) -> float:
    """Curvature constant max{C1, 1/r} with C1 = max boundary curvature of -Omega.

    For a disk of radius R the outer boundary contributes C1 = -1/R, so the
    constant is 1/r for every valid domain here; the formula is kept explicit.
    """
    c1 = -1.0 / domain.outer_radius
    return max(c1, 1.0 / domain.hole_radius)


def compute_K0(domain: DomainSpec, samples_per_circle: int = 4096) -> float:
    """Interior tangent-ball diameter of W.

    Largest d such that every boundary point admits a ball of diameter d
    inside W tangent at that point.  Single hole centered at the origin
    admits the closed form R - r; other layouts are solved by bisection
    over densely sampled boundary points (the predicate "tangent ball of
    radius rho fits" is monotone in rho).
    """
    R = domain.outer_radius
    r = domain.hole_radius
    if len(domain.holes) == 1 and math.hypot(*domain.holes[0].center) < 1e-14:
        return R - r

    feet = []
    normals = []  # inward (into W)
    phis = np.linspace(0.0, 2.0 * np.pi, samples_per_circle, endpoint=False)
    ring = np.stack([np.cos(phis), np.sin(phis)], axis=1)
    feet.append(R * ring)
    normals.append(-ring)
    for hole in domain.holes:
        feet.append(np.asarray(hole.center) + r * ring)
        normals.append(ring.copy())
    feet = np.concatenate(feet, axis=0)
    normals = np.concatenate(normals, axis=0)

    def fits(rho: np.ndarray) -> np.ndarray:
        q = feet + rho[:, None] * normals
        ok = np.hypot(q[:, 0], q[:, 1]) <= R - rho + 1e-12
        for hole in domain.holes:
            dj = np.hypot(q[:, 0] - hole.center[0], q[:, 1] - hole.center[1])
            ok &= dj >= r + rho - 1e-12
        return ok

    lo = np.zeros(len(feet))
    hi = np.full(len(feet), R)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        ok = fits(mid)
        lo[ok] = mid[ok]
        hi[~ok] = mid[~ok]
    return float(2.0 * lo.min())


def forcing_margin(domain: DomainSpec, c, dc_sup: float, grid: "Grid | None" = None) -> float:
    """Minimum over W of c^2 - 2*sup|Dc| - 2*C0*c - 8*C0/K0.

    Positive values certify the forcing regime in which gradient bounds
    and long-time convergence hold.  ``c`` may be a scalar, a Forcing, or
    a callable mapping (N, 2) points to values; non-constant forcing is
    evaluated on grid nodes inside W (a reference grid is built when none
    is supplied).
    """
    C0 = compute_C0(domain)
    K0 = compute_K0(domain)
    penalty = 2.0 * dc_sup + 8.0 * C0 / K0

    if isinstance(c, Forcing) and c.kind == "constant":
        c = float(c.value)
    if np.isscalar(c):
        v = float(c)
        return v * v - penalty - 2.0 * C0 * v
    if grid is None:
        grid = build_grid(domain, reference_spacing(domain))
    pts = grid.points()[grid.classification == INTERIOR]
    values = c(pts) if not isinstance(c, Forcing) else c.evaluate(pts)
    values = np.asarray(values, dtype=float)
    return float(np.min(values * values - 2.0 * C0 * values) - penalty)


def reference_spacing(domain: DomainSpec) -> float:
    """Default grid spacing min(r, K0) / 10 used by the scenario catalog."""
    return min(domain.hole_radius, compute_K0(domain)) / 10.0


@dataclass
class Grid:
    """Uniform node-centered grid with classification and ghost tables.

    Node (i, j) sits at (origin[0] + i*h, origin[1] + j*h).  Arrays are
    indexed [i, j] (x index first).  Ghost nodes carry everything the
    Neumann fill needs: boundary foot, outward normal, distance to the
    boundary, a probe point strictly inside W reached by marching the
    inward normal, and bilinear interpolation data for that probe.
    """

    h: float
    origin: tuple[float, float]
    nx: int
    ny: int
    classification: np.ndarray
    interior_i: np.ndarray
    interior_j: np.ndarray
    ghost_i: np.ndarray
    ghost_j: np.ndarray
    ghost_foot: np.ndarray      # (G, 2)
    ghost_normal: np.ndarray    # (G, 2) outward from W
    ghost_dist: np.ndarray      # (G,) node-to-boundary distance
    ghost_span: np.ndarray      # (G,) node-to-probe distance along the normal
    ghost_corners: np.ndarray   # (G, 4) flat indices of probe cell corners
    ghost_weights: np.ndarray   # (G, 4) bilinear weights (each row sums to 1)
    domain: DomainSpec | None = None
    strip: Rect | None = None
    outer_disks: tuple[Disk, ...] = ()
    _mesh: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False)

    def node_mesh(self) -> tuple[np.ndarray, np.ndarray]:
        if self._mesh is None:
            xs = self.origin[0] + self.h * np.arange(self.nx)[:, None]
            ys = self.origin[1] + self.h * np.arange(self.ny)[None, :]
            self._mesh = (np.broadcast_to(xs, (self.nx, self.ny)).copy(),
                          np.broadcast_to(ys, (self.nx, self.ny)).copy())
        return self._mesh

    def points(self) -> np.ndarray:
        xs, ys = self.node_mesh()
        return np.stack([xs, ys], axis=-1)

    def interior_flat(self) -> np.ndarray:
        return self.interior_i.astype(np.int64) * self.ny + self.interior_j

    def ghost_flat(self) -> np.ndarray:
        return self.ghost_i.astype(np.int64) * self.ny + self.ghost_j

    def active_flat(self) -> np.ndarray:
        """Flat indices of interior plus boundary nodes (extrema are taken here)."""
        return np.concatenate([self.interior_flat(), self.ghost_flat()])

    def new_field(self, fill: float = 0.0) -> np.ndarray:
        return np.full((self.nx, self.ny), fill, dtype=float)

    @property
    def n_interior(self) -> int:
        return len(self.interior_i)


def _candidate(dist, foot_x, foot_y, n_x, n_y, valid, code):
    return {"dist": dist, "fx": foot_x, "fy": foot_y,
            "nx": n_x, "ny": n_y, "valid": valid, "code": code}


def build_grid(domain: DomainSpec, h: float, *, strip: Rect | None = None,
               outer_disks=None) -> Grid:
    """Classify nodes and assemble ghost reflection tables.

    ``strip`` removes an axis-aligned rectangle from W (node reclassification,
    used for the excluded-strip scenario).  ``outer_disks`` replaces the single
    outer disk by a union of disks (pinched outer boundary); the DomainSpec
    then only contributes its holes.
    """
    r = domain.hole_radius
    if h >= r / 4.0:
        raise HoleTooSmall(f"need h < r/4 = {r / 4.0} to resolve holes, got h = {h}")
    disks = tuple(outer_disks) if outer_disks else (Disk((0.0, 0.0), domain.outer_radius),)

    r_max = max(math.hypot(*d.center) + d.radius for d in disks)
    n_half = int(math.ceil((r_max + GHOST_BAND * h) / h))
    origin = (-n_half * h, -n_half * h)
    nx = ny = 2 * n_half + 1

    xs = origin[0] + h * np.arange(nx)[:, None]
    ys = origin[1] + h * np.arange(ny)[None, :]
    xs = np.broadcast_to(xs, (nx, ny)).copy()
    ys = np.broadcast_to(ys, (nx, ny)).copy()

    # Sign-exact membership tests.
    sdf_outer = np.full((nx, ny), -np.inf)
    for d in disks:
        sdf_outer = np.maximum(sdf_outer, d.radius - np.hypot(xs - d.center[0], ys - d.center[1]))
    inside_hole = np.zeros((nx, ny), dtype=bool)
    hole_rho = []
    for hole in domain.holes:
        rho = np.hypot(xs - hole.center[0], ys - hole.center[1])
        hole_rho.append(rho)
        inside_hole |= rho < r
    in_strip = strip.contains(xs, ys) if strip is not None else np.zeros((nx, ny), dtype=bool)

    interior = (sdf_outer > 0.0) & ~inside_hole & ~in_strip
    classification = np.where(interior, INTERIOR, EXTERIOR).astype(np.int16)

    # --- ghost candidates on the non-interior side ---------------------------
    band = ~interior
    bx, by = xs[band], ys[band]
    candidates = []

    outside_union = sdf_outer[band] <= 0.0
    for d in disks:
        rho = np.hypot(bx - d.center[0], by - d.center[1])
        safe = np.maximum(rho, 1e-300)
        fx = d.center[0] + d.radius * (bx - d.center[0]) / safe
        fy = d.center[1] + d.radius * (by - d.center[1]) / safe
        valid = outside_union & (rho > 1e-12) & _foot_on_boundary(
            fx, fy, disks, domain.holes, strip, skip_disk=d)
        candidates.append(_candidate(rho - d.radius, fx, fy,
                                     (fx - d.center[0]) / d.radius,
                                     (fy - d.center[1]) / d.radius,
                                     valid, OUTER_BOUNDARY))

    for j, hole in enumerate(domain.holes):
        rho = np.hypot(bx - hole.center[0], by - hole.center[1])
        safe = np.maximum(rho, 1e-300)
        fx = hole.center[0] + r * (bx - hole.center[0]) / safe
        fy = hole.center[1] + r * (by - hole.center[1]) / safe
        valid = (rho < r) & (rho > 1e-12) & _foot_on_boundary(
            fx, fy, disks, domain.holes, strip, skip_hole=j)
        candidates.append(_candidate(r - rho, fx, fy,
                                     -(fx - hole.center[0]) / r,
                                     -(fy - hole.center[1]) / r,
                                     valid, hole_code(j)))

    corner_points, corner_codes = _corner_candidates(disks, domain.holes, strip)

    if strip is not None:
        inb = strip.contains(bx, by)
        for sign in (1.0, -1.0):
            fy = np.full_like(bx, sign * strip.y_half)
            valid = inb & _foot_on_boundary(bx, fy, disks, domain.holes, None)
            candidates.append(_candidate(strip.y_half - sign * by, bx.copy(), fy,
                                         np.zeros_like(bx), np.full_like(bx, -sign),
                                         valid, MASK_BOUNDARY))
            fx = np.full_like(bx, sign * strip.x_half)
            valid = inb & _foot_on_boundary(fx, by, disks, domain.holes, None)
            candidates.append(_candidate(strip.x_half - sign * bx, fx, by.copy(),
                                         np.full_like(bx, -sign), np.zeros_like(bx),
                                         valid, MASK_BOUNDARY))

    for (cx, cy), code in zip(corner_points, corner_codes):
        dist = np.hypot(bx - cx, by - cy)
        safe = np.maximum(dist, 1e-300)
        candidates.append(_candidate(dist, np.full_like(bx, cx), np.full_like(bx, cy),
                                     (bx - cx) / safe, (by - cy) / safe,
                                     dist > 1e-12, code))

    n_band = len(bx)
    best_dist = np.full(n_band, np.inf)
    best = np.zeros((n_band, 5))  # fx, fy, nx, ny, code
    for cand in candidates:
        d = np.where(cand["valid"], cand["dist"], np.inf)
        better = d < best_dist
        best_dist = np.where(better, d, best_dist)
        for col, key in enumerate(("fx", "fy", "nx", "ny")):
            v = cand[key]
            best[better, col] = v[better] if isinstance(v, np.ndarray) else v
        best[better, 4] = cand["code"]

    is_ghost = best_dist <= GHOST_BAND * h
    band_i, band_j = np.nonzero(band)
    gi = band_i[is_ghost].astype(np.int32)
    gj = band_j[is_ghost].astype(np.int32)
    classification[gi, gj] = best[is_ghost, 4].astype(np.int16)
    foot = best[is_ghost, 0:2].copy()
    normal = best[is_ghost, 2:4].copy()
    gdist = best_dist[is_ghost].copy()

    grid = Grid(h=h, origin=origin, nx=nx, ny=ny, classification=classification,
                interior_i=np.nonzero(interior)[0].astype(np.int32),
                interior_j=np.nonzero(interior)[1].astype(np.int32),
                ghost_i=gi, ghost_j=gj, ghost_foot=foot, ghost_normal=normal,
                ghost_dist=gdist,
                ghost_span=np.zeros(len(gi)),
                ghost_corners=np.zeros((len(gi), 4), dtype=np.int64),
                ghost_weights=np.zeros((len(gi), 4)),
                domain=domain, strip=strip,
                outer_disks=disks if outer_disks else ())
    _attach_probes(grid)
    for arr in (grid.classification, grid.ghost_foot, grid.ghost_normal,
                grid.ghost_dist, grid.ghost_span, grid.ghost_corners, grid.ghost_weights):
        arr.setflags(write=False)
    return grid


def _foot_on_boundary(fx, fy, disks, holes, strip, skip_disk=None, skip_hole=None):
    """A projected foot only counts if it actually lies on the boundary of W."""
    ok = np.zeros(np.shape(fx), dtype=bool)
    for d in disks:
        if d is skip_disk:
            continue
        ok |= np.hypot(fx - d.center[0], fy - d.center[1]) < d.radius - _TOL
    if skip_disk is not None:
        valid = ~ok  # not strictly inside any other outer disk
    else:
        # Foot of a hole/strip/corner candidate must not leave the outer union.
        inside_union = np.zeros(np.shape(fx), dtype=bool)
        for d in disks:
            inside_union |= np.hypot(fx - d.center[0], fy - d.center[1]) <= d.radius + _TOL
        valid = inside_union
    for k, hole in enumerate(holes):
        if k == skip_hole:
            continue
        valid &= np.hypot(fx - hole.center[0], fy - hole.center[1]) > hole.radius - _TOL
    if strip is not None:
        valid &= ~strip.contains(fx, fy, tol=_TOL)
    return valid


def _corner_candidates(disks, holes, strip):
    """Boundary corner points: outer-disk crossings and strip corners on W's rim."""
    points, codes = [], []
    for a in range(len(disks)):
        for b in range(a + 1, len(disks)):
            for p in _circle_intersections(disks[a], disks[b]):
                inside_other = any(
                    math.hypot(p[0] - d.center[0], p[1] - d.center[1]) < d.radius - _TOL
                    for k, d in enumerate(disks) if k not in (a, b))
                if not inside_other:
                    points.append(p)
                    codes.append(OUTER_BOUNDARY)
    if strip is not None:
        for sx in (-1.0, 1.0):
            for sy in (-1.0, 1.0):
                points.append((sx * strip.x_half, sy * strip.y_half))
                codes.append(MASK_BOUNDARY)
    return points, codes


def _circle_intersections(d1: Disk, d2: Disk):
    (x1, y1), r1 = d1.center, d1.radius
    (x2, y2), r2 = d2.center, d2.radius
    dx, dy = x2 - x1, y2 - y1
    dist = math.hypot(dx, dy)
    if dist < 1e-14 or dist > r1 + r2 or dist < abs(r1 - r2):
        return []
    a = (r1 * r1 - r2 * r2 + dist * dist) / (2.0 * dist)
    h2 = r1 * r1 - a * a
    if h2 < 0:
        return []
    hh = math.sqrt(h2)
    mx, my = x1 + a * dx / dist, y1 + a * dy / dist
    if hh < 1e-14:
        return [(mx, my)]
    ox, oy = -dy / dist * hh, dx / dist * hh
    return [(mx + ox, my + oy), (mx - ox, my - oy)]


def _attach_probes(grid: Grid) -> None:
    """Place each ghost's probe point inside W and cache bilinear data.

    The probe sits on the inward normal at depth >= 2h below the boundary
    foot, deep enough that all four corners of its interpolation cell are
    interior nodes; the depth is increased in steps of h when the curved
    boundary makes the first choice straddle the boundary.
    """
    h = grid.h
    n_ghost = len(grid.ghost_i)
    span = grid.ghost_span
    corners = grid.ghost_corners
    weights = grid.ghost_weights
    pending = np.arange(n_ghost)
    for attempt in range(5):
        depth = (2.0 + attempt) * h
        px = grid.ghost_foot[pending, 0] - depth * grid.ghost_normal[pending, 0]
        py = grid.ghost_foot[pending, 1] - depth * grid.ghost_normal[pending, 1]
        ok, cor, wgt = _bilinear(grid, px, py, require_interior=True)
        idx = pending[ok]
        corners[idx] = cor[ok]
        weights[idx] = wgt[ok]
        span[idx] = grid.ghost_dist[idx] + depth
        pending = pending[~ok]
        if len(pending) == 0:
            break
    if len(pending):
        # Fall back to the base depth with weights renormalized over whatever
        # interior corners the cell has; only reachable in tight mask corners.
        px = grid.ghost_foot[pending, 0] - 2.0 * h * grid.ghost_normal[pending, 0]
        py = grid.ghost_foot[pending, 1] - 2.0 * h * grid.ghost_normal[pending, 1]
        ok, cor, wgt = _bilinear(grid, px, py, require_interior=False)
        if not np.all(ok):
            raise DegenerateDomain(
                f"{np.count_nonzero(~ok)} ghost nodes found no interior data for their probes")
        corners[pending] = cor
        weights[pending] = wgt
        span[pending] = grid.ghost_dist[pending] + 2.0 * h


def _bilinear(grid: Grid, px, py, require_interior: bool):
    gx = (px - grid.origin[0]) / grid.h
    gy = (py - grid.origin[1]) / grid.h
    ix = np.clip(np.floor(gx).astype(np.int64), 0, grid.nx - 2)
    iy = np.clip(np.floor(gy).astype(np.int64), 0, grid.ny - 2)
    fx = gx - ix
    fy = gy - iy
    w = np.stack([(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy], axis=1)
    ii = np.stack([ix, ix + 1, ix, ix + 1], axis=1)
    jj = np.stack([iy, iy, iy + 1, iy + 1], axis=1)
    interior = grid.classification[ii, jj] == INTERIOR
    if require_interior:
        ok = np.all(interior, axis=1)
        return ok, ii * grid.ny + jj, w
    w = np.where(interior, w, 0.0)
    total = w.sum(axis=1)
    ok = total > 1e-12
    w[ok] /= total[ok, None]
    return ok, ii * grid.ny + jj, w
