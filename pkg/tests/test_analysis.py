import numpy as np
import pytest

from spiralflow.analysis import (GrowthSeries, growth_bounds, growth_rate, height,
                                 sandwich_constant, tip_growth_rate, winding_index)
from spiralflow.errors import HypothesisViolated, InsufficientData
from spiralflow.forcing import Forcing
from spiralflow.geometry import DomainSpec, Hole


class _FakeTheta:
    """Stand-in carrying just the cached principal branch and strengths."""

    def __init__(self, theta, strengths=(1,)):
        self.theta = np.asarray(theta, dtype=float)
        self._strengths = strengths

    def total_strength(self):
        return int(sum(abs(m) for m in self._strengths))


def test_winding_index_counts_sheets():
    theta = _FakeTheta(np.zeros(5))
    u = np.array([0.0, np.pi - 1e-9, np.pi, 2 * np.pi, -3 * np.pi])
    np.testing.assert_array_equal(winding_index(u, theta), [0, 0, 1, 1, -1])


def test_winding_residual_stays_in_principal_window():
    rng_vals = np.linspace(-20.0, 20.0, 4001)
    theta = _FakeTheta(np.full_like(rng_vals, 1.3))
    k = winding_index(rng_vals, theta)
    res = rng_vals - 1.3 - 2 * np.pi * k
    assert np.all(res >= -np.pi) and np.all(res < np.pi)


def test_height_frozen_examples():
    theta = _FakeTheta([np.pi / 2, np.pi / 2])
    h0 = 2 * np.pi
    # u on the arm (u = Theta): residual 0 counts as the upper terrace.
    z = height(np.array([np.pi / 2, np.pi / 2 + 2 * np.pi]), theta, h0)
    np.testing.assert_allclose(z, [3 * np.pi / 2, 3 * np.pi / 2 + 2 * np.pi])
    # Just below the arm the height drops by one full step.
    z_lo = height(np.array([np.pi / 2 - 1e-9]), _FakeTheta([np.pi / 2]), h0)
    assert z_lo[0] == pytest.approx(-np.pi / 2)


def test_height_scales_linearly_with_step(annulus_grid, annulus_theta):
    u = annulus_theta.theta + 0.3
    z1 = height(u, annulus_theta, 1.0)
    z2 = height(u, annulus_theta, 2.0)
    np.testing.assert_allclose(z2, 2.0 * z1, atol=1e-14)


def test_sandwich_constant_counts_strengths():
    assert sandwich_constant(_FakeTheta(0.0, (1,)), 1.0) == pytest.approx(
        (2 * np.pi + 1.0) * 2)
    assert sandwich_constant(_FakeTheta(0.0, (1, -1)), 0.5) == pytest.approx(
        (2 * np.pi + 0.5) * 3)


def test_growth_rate_exact_on_affine_series():
    t = np.linspace(0.0, 10.0, 101)
    series = GrowthSeries(t, 2.5 * t + 0.75, u0_sup=0.75)
    slope, fekete = growth_rate(series)
    assert slope == pytest.approx(2.5, abs=1e-12)
    # (S + sup|u0|) / t = 2.5 + 1.5/t is minimized at the last sample.
    assert fekete == pytest.approx(2.5 + 1.5 / 10.0, abs=1e-12)


def test_growth_rate_needs_samples():
    with pytest.raises(InsufficientData):
        growth_rate(GrowthSeries(np.array([0.0]), np.array([0.0]), 0.0))


def test_fekete_estimate_upper_bounds_slope_for_concave_series():
    # Concave growth (fast transient, then settling): S(t)/t decreases, so
    # the subadditive estimate stays above the settled slope.
    t = np.linspace(0.0, 20.0, 201)
    S = 3.0 * t + 2.0 * (1.0 - np.exp(-t))
    slope, fekete = growth_rate(GrowthSeries(t, S, 0.0))
    assert slope <= fekete + 1e-9


def test_growth_bounds_constant_and_radial(annulus_domain):
    lo, hi = growth_bounds(annulus_domain, Forcing.constant(3.0))
    assert (lo, hi) == (pytest.approx(1.5), pytest.approx(6.0))
    lo, hi = growth_bounds(annulus_domain, Forcing.radial(1.0))
    assert (lo, hi) == (pytest.approx(1.0), pytest.approx(1.0))
    lo, hi = growth_bounds(annulus_domain, 2.0)
    assert (lo, hi) == (pytest.approx(1.0), pytest.approx(4.0))


def test_growth_bounds_reject_offcenter_or_multiwinding(pair_domain):
    with pytest.raises(HypothesisViolated):
        growth_bounds(pair_domain, Forcing.constant(1.0))
    off = DomainSpec(2.0, (Hole((0.3, 0.0), 0.5, 1),))
    with pytest.raises(HypothesisViolated):
        growth_bounds(off, Forcing.constant(1.0))
    double = DomainSpec(2.0, (Hole((0.0, 0.0), 0.5, 2),))
    with pytest.raises(HypothesisViolated):
        growth_bounds(double, Forcing.constant(1.0))


def test_tip_growth_rate_recovers_affine_slope():
    t = np.linspace(0.0, 8.0, 33)
    assert tip_growth_rate(t, 0.7 * t - 0.1) == pytest.approx(0.7, abs=1e-12)
    with pytest.raises(InsufficientData):
        tip_growth_rate([1.0], [2.0])
