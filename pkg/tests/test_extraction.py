import numpy as np
import pytest

from conftest import angular_profile
from spiralflow.errors import DegenerateLevelSet
from spiralflow.extraction import (extract_spirals, hausdorff_distance,
                                   phase_residual, resample_polyline)
from spiralflow.geometry import DomainSpec, Hole, build_grid
from spiralflow.theta import SpiralCenter, ThetaField


def _segment(r, R, n=400):
    return np.stack([np.linspace(r, R, n), np.zeros(n)], axis=-1)


def test_zero_field_gives_radial_segment(annulus_grid, annulus_theta):
    zero = np.zeros((annulus_grid.nx, annulus_grid.ny))
    curves = extract_spirals(zero, annulus_theta, annulus_grid)
    assert len(curves) == 1
    pts = curves[0].points
    assert hausdorff_distance(pts, _segment(0.5, 2.0)) <= annulus_grid.h
    assert np.abs(pts[:, 1]).max() < 1e-12  # exactly on the positive x axis


def test_extraction_invariant_under_full_sheet_shift(annulus_grid, annulus_theta):
    base = angular_profile(annulus_grid)
    c_base = extract_spirals(base, annulus_theta, annulus_grid)
    c_shift = extract_spirals(base + 2.0 * np.pi, annulus_theta, annulus_grid)
    assert len(c_base) == len(c_shift)
    for a, b in zip(c_base, c_shift):
        np.testing.assert_allclose(a.points, b.points, atol=1e-9)


def test_rotated_phase_rotates_curve(annulus_grid, annulus_theta):
    ang = 0.5
    zero = np.zeros((annulus_grid.nx, annulus_grid.ny))
    shifted = np.full_like(zero, ang)
    c0 = extract_spirals(zero, annulus_theta, annulus_grid)
    c1 = extract_spirals(shifted, annulus_theta, annulus_grid)
    # u = const = ang selects the ray at polar angle ang.
    rot = np.array([[np.cos(ang), -np.sin(ang)], [np.sin(ang), np.cos(ang)]])
    p0 = np.concatenate([c.points for c in c0]) @ rot.T
    p1 = np.concatenate([c.points for c in c1])
    assert hausdorff_distance(p0, p1) <= 2.0 * annulus_grid.h


def test_flat_phase_field_is_degenerate(annulus_grid, annulus_theta):
    u = annulus_theta.theta.copy()  # sin(u - theta) vanishes identically
    with pytest.raises(DegenerateLevelSet):
        extract_spirals(u, annulus_theta, annulus_grid)


def test_phase_residual_components(annulus_grid, annulus_theta):
    u = annulus_theta.theta + 0.25
    s, c = phase_residual(u, annulus_theta)
    sel = annulus_grid.classification == 1
    np.testing.assert_allclose(s[sel], np.sin(0.25), atol=1e-12)
    np.testing.assert_allclose(c[sel], np.cos(0.25), atol=1e-12)


def test_curves_stay_inside_domain(annulus_domain, annulus_grid, annulus_theta):
    u = angular_profile(annulus_grid) + 1.0
    for curve in extract_spirals(u, annulus_theta, annulus_grid):
        rho = np.hypot(curve.points[:, 0], curve.points[:, 1])
        assert np.all(rho >= 0.5 - 1e-9)
        assert np.all(rho <= 2.0 + 1e-9)


def test_two_center_field_yields_two_arms(pair_domain):
    grid = build_grid(pair_domain, 0.03)
    theta = ThetaField(grid, (SpiralCenter(-0.8, 0.0, 1), SpiralCenter(0.8, 0.0, -1)))
    curves = extract_spirals(np.zeros((grid.nx, grid.ny)), theta, grid)
    assert len(curves) >= 1
    total = sum(len(c.points) for c in curves)
    assert total > 20


def test_resample_spacing_is_uniform():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])
    out = resample_polyline(pts, 0.25)
    gaps = np.hypot(*np.diff(out, axis=0).T)
    assert np.allclose(gaps, gaps[0])
    assert out[0] == pytest.approx([0.0, 0.0])
    assert out[-1] == pytest.approx([1.0, 1.0])


def test_hausdorff_is_symmetric_and_zero_on_self():
    a = np.random.default_rng(7).normal(size=(40, 2))
    assert hausdorff_distance(a, a) == 0.0
    b = a + [0.1, 0.0]
    assert hausdorff_distance(a, b) == pytest.approx(hausdorff_distance(b, a))
