import math

import numpy as np
import pytest

from spiralflow.errors import DegenerateDomain, HoleTooSmall, NotOnBoundary
from spiralflow.forcing import Forcing
from spiralflow.geometry import (DomainSpec, Disk, Hole, Rect, build_grid,
                                 compute_C0, compute_K0, forcing_margin,
                                 outward_normal, reference_spacing,
                                 signed_distance)


def _annulus(R, r):
    return DomainSpec(R, (Hole((0.0, 0.0), r, 1),))


class TestDomainSpec:
    def test_rejects_empty_hole_list(self):
        with pytest.raises(DegenerateDomain):
            DomainSpec(2.0, ())

    def test_rejects_hole_touching_outer_boundary(self):
        with pytest.raises(DegenerateDomain):
            DomainSpec(1.0, (Hole((0.6, 0.0), 0.4, 1),))

    def test_rejects_overlapping_holes(self):
        with pytest.raises(DegenerateDomain):
            DomainSpec(3.0, (Hole((-0.2, 0.0), 0.3, 1), Hole((0.2, 0.0), 0.3, -1)))

    def test_rejects_mixed_radii(self):
        with pytest.raises(DegenerateDomain):
            DomainSpec(3.0, (Hole((-1.0, 0.0), 0.3, 1), Hole((1.0, 0.0), 0.2, 1)))

    def test_rejects_zero_strength(self):
        with pytest.raises(DegenerateDomain):
            DomainSpec(2.0, (Hole((0.0, 0.0), 0.5, 0),))


def test_signed_distance_annulus():
    dom = _annulus(2.0, 0.5)
    pts = np.array([[1.0, 0.0], [0.0, 0.6], [0.0, 0.0], [2.5, 0.0]])
    np.testing.assert_allclose(signed_distance(dom, pts), [0.5, 0.1, -0.5, -0.5])


def test_outward_normal_points_out_of_domain():
    dom = _annulus(2.0, 0.5)
    np.testing.assert_allclose(outward_normal(dom, (2.0, 0.0)), [1.0, 0.0])
    np.testing.assert_allclose(outward_normal(dom, (0.0, 0.5)), [0.0, -1.0])
    with pytest.raises(NotOnBoundary):
        outward_normal(dom, (1.0, 0.0))


def test_curvature_constant_examples():
    assert compute_C0(_annulus(2.0, 0.5)) == pytest.approx(2.0)
    assert compute_C0(_annulus(3.0, 1.0)) == pytest.approx(1.0)
    assert compute_C0(_annulus(2.0, 0.25)) == pytest.approx(4.0)


def test_tangent_ball_diameter_annulus_closed_form():
    assert compute_K0(_annulus(2.0, 0.5)) == pytest.approx(1.5, abs=1e-12)
    assert compute_K0(_annulus(1.0, 0.5)) == pytest.approx(0.5, abs=1e-12)


def test_tangent_ball_diameter_hole_pair(pair_domain):
    # Facing feet of the two holes: tangent ball grows until it touches the
    # other hole, at radius (1.6 - 2 * 0.3) / 2 = 0.5, so the diameter is 1.
    assert compute_K0(pair_domain) == pytest.approx(1.0, abs=1e-4)


def test_tangent_ball_diameter_off_center_single_hole():
    # Hole pushed toward the rim: the pinch between hole and outer circle
    # limits the ball to (R - l - r) there.
    dom = DomainSpec(2.0, (Hole((1.0, 0.0), 0.4, 1),))
    assert compute_K0(dom) == pytest.approx(0.6, abs=1e-4)


def test_forcing_margin_closed_forms():
    dom = _annulus(1.0, 0.5)
    assert forcing_margin(dom, 8.0, 0.0) == pytest.approx(0.0, abs=1e-10)
    assert forcing_margin(dom, 9.0, 0.0) == pytest.approx(13.0, abs=1e-10)
    assert forcing_margin(dom, 4.0, 0.0) == pytest.approx(-32.0, abs=1e-10)
    assert forcing_margin(dom, Forcing.constant(9.0), 0.0) == pytest.approx(
        13.0, abs=1e-10)


def test_forcing_margin_quadratic_root_identity():
    # With dc_sup = 0 the margin vanishes exactly at c = C0 + sqrt(C0^2 + 8 C0/K0).
    dom = _annulus(2.0, 0.5)
    C0, K0 = compute_C0(dom), compute_K0(dom)
    root = C0 + math.sqrt(C0 * C0 + 8.0 * C0 / K0)
    assert forcing_margin(dom, root, 0.0) == pytest.approx(0.0, abs=1e-10)


def test_forcing_margin_nonconstant_uses_interior_min(annulus_domain, annulus_grid):
    margin = forcing_margin(annulus_domain, Forcing.radial(1.0), 1.0,
                            grid=annulus_grid)
    C0, K0 = compute_C0(annulus_domain), compute_K0(annulus_domain)
    # |x| spans about [r, R] on interior nodes; the quadratic v^2 - 2 C0 v is
    # minimized at the largest v below C0 = 2, which the interior attains.
    xs, ys = annulus_grid.node_mesh()
    sel = annulus_grid.classification == 1
    v = np.hypot(xs, ys)[sel]
    expected = float(np.min(v * v - 2 * C0 * v)) - 2.0 - 8.0 * C0 / K0
    assert margin == pytest.approx(expected, rel=1e-12)


def test_reference_spacing_rule():
    assert reference_spacing(_annulus(2.0, 0.5)) == pytest.approx(0.05)
    dom = DomainSpec(3.0, (Hole((-0.8, 0.0), 0.3, 1), Hole((0.8, 0.0), 0.3, -1)))
    assert reference_spacing(dom) == pytest.approx(0.03, abs=1e-5)


class TestBuildGrid:
    def test_rejects_coarse_grid(self, annulus_domain):
        with pytest.raises(HoleTooSmall):
            build_grid(annulus_domain, 0.2)

    def test_interior_area_matches_annulus(self, annulus_grid):
        area = annulus_grid.n_interior * annulus_grid.h**2
        exact = math.pi * (4.0 - 0.25)
        assert abs(area - exact) / exact < 0.02

    def test_grid_is_symmetric_and_odd(self, annulus_grid):
        g = annulus_grid
        assert g.nx == g.ny and g.nx % 2 == 1
        assert g.origin[0] == -g.origin[0] - (g.nx - 1) * g.h  # centered on 0

    def test_classification_partitions_nodes(self, annulus_grid):
        cls = annulus_grid.classification
        codes = set(np.unique(cls).tolist())
        assert codes == {0, 1, 2, 4}
        ghosts = np.zeros_like(cls, dtype=bool)
        ghosts[annulus_grid.ghost_i, annulus_grid.ghost_j] = True
        assert np.array_equal(ghosts, cls >= 2)

    def test_ghost_feet_sit_on_boundary(self, annulus_domain, annulus_grid):
        d = signed_distance(annulus_domain, annulus_grid.ghost_foot)
        assert np.abs(d).max() < 1e-12

    def test_ghost_normals_are_unit_outward(self, annulus_domain, annulus_grid):
        n = annulus_grid.ghost_normal
        np.testing.assert_allclose(np.hypot(n[:, 0], n[:, 1]), 1.0, atol=1e-12)
        probe = annulus_grid.ghost_foot - 1e-6 * n
        assert np.all(signed_distance(annulus_domain, probe) > 0.0)

    def test_ghost_distances_within_band(self, annulus_grid):
        g = annulus_grid
        assert np.all(g.ghost_dist >= 0.0)
        assert np.all(g.ghost_dist <= 2.0 * g.h + 1e-12)

    def test_probe_weights_interpolate_interior(self, annulus_grid):
        g = annulus_grid
        np.testing.assert_allclose(g.ghost_weights.sum(axis=1), 1.0, atol=1e-12)
        assert np.all(g.ghost_weights >= -1e-12)
        corner_class = g.classification.ravel()[g.ghost_corners]
        assert np.all(corner_class == 1)
        assert np.all(g.ghost_span >= 2.0 * g.h - 1e-12)

    def test_strip_mask_removes_rectangle(self, pair_domain):
        strip = Rect(0.8, 0.3)
        grid = build_grid(pair_domain, 0.05, strip=strip)
        xs, ys = grid.node_mesh()
        inside_strip = strip.contains(xs, ys)
        assert not np.any((grid.classification == 1) & inside_strip)
        assert np.any(grid.classification == 3)

    def test_outer_disk_union_replaces_outer_circle(self):
        dom = DomainSpec(2.8, (Hole((0.0, 0.0), 0.25, 1),))
        disks = (Disk((-1.3, 0.0), 1.5), Disk((1.3, 0.0), 1.5))
        grid = build_grid(dom, 0.025, outer_disks=disks)
        xs, ys = grid.node_mesh()
        inside_union = np.minimum(np.hypot(xs + 1.3, ys), np.hypot(xs - 1.3, ys)) < 1.5
        interior = grid.classification == 1
        assert np.all(inside_union[interior])
        # the waist at x = 0 stays open: interior nodes above the hole
        assert np.any(interior & (np.abs(xs) < 0.0125) & (ys > 0.3))
