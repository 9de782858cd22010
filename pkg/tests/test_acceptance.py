"""End-to-end acceptance gate.

Each test exercises one numbered criterion through the same suite object the
``verify`` subcommand uses, so runs are shared across criteria.  Run with
``-s`` to see the per-criterion detail lines.
"""

import pytest

from spiralflow.acceptance import AcceptanceSuite


@pytest.fixture(scope="module")
def suite():
    return AcceptanceSuite()


def _check(result):
    print(result.line())
    assert result.passed, result.detail


def test_01_rotating_solution_converges(suite):
    _check(suite.rotating_convergence())


def test_02_radial_forcing_gives_unit_growth_rate(suite):
    _check(suite.radial_growth_rate())


def test_03_constant_forcing_rate_sits_in_bracket(suite):
    _check(suite.constant_growth_bracket())


def test_04_forcing_margin_arithmetic(suite):
    _check(suite.margin_arithmetic())


def test_05_inactive_pair_growth_plateaus(suite):
    _check(suite.inactive_pair_plateau())


def test_06_barrier_bound_holds_across_catalog(suite):
    _check(suite.barrier_invariant())


def test_07_comparison_principle_preserves_ordering(suite):
    _check(suite.comparison_principle())


def test_08_circulation_quadrature(suite):
    _check(suite.circulation_quadrature())


def test_09_height_reconstruction_residual_and_sandwich(suite):
    _check(suite.height_reconstruction())


def test_10_lipschitz_bounds_under_strong_forcing(suite):
    _check(suite.lipschitz_regime())


def test_11_spiral_extraction_accuracy(suite):
    _check(suite.spiral_extraction())


def test_12_diagnostics_are_deterministic(suite):
    _check(suite.determinism())
