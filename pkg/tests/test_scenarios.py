import dataclasses
import json

import numpy as np
import pytest

from spiralflow.errors import UnknownScenario
from spiralflow.scenarios import (InitialCondition, Scenario, build_scenario,
                                  catalog, evaluate_checks, rotating_exact,
                                  run_scenario)


def test_catalog_names_are_stable():
    assert sorted(catalog()) == ["annulus_constant", "annulus_radial",
                                 "inactive_pair", "lipschitz_regime",
                                 "opposite_pair_strip", "pinched_single"]


def test_catalog_round_trips_through_json(tmp_path):
    for name, sc in catalog().items():
        blob = json.dumps(sc.to_json())
        again = Scenario.from_json(json.loads(blob))
        assert again == sc, name


def test_build_scenario_from_file(tmp_path):
    sc = catalog()["annulus_constant"]
    path = tmp_path / "custom.json"
    data = sc.to_json()
    data["name"] = "custom"
    path.write_text(json.dumps(data))
    loaded = build_scenario(str(path))
    assert loaded.name == "custom"
    assert loaded.domain == sc.domain


def test_unknown_scenario_raises():
    with pytest.raises(UnknownScenario):
        build_scenario("annulus_of_unusual_size")


def test_spacing_follows_domain_rule():
    assert catalog()["annulus_constant"].spacing() == pytest.approx(0.05)
    assert catalog()["pinched_single"].spacing() == pytest.approx(0.025)


def test_initial_condition_families(annulus_grid):
    flat = InitialCondition("constant", 0.7).node_values(annulus_grid)
    assert np.all(flat == 0.7)
    ang = InitialCondition("angular", 0.3).node_values(annulus_grid)
    xs, ys = annulus_grid.node_mesh()
    sel = annulus_grid.classification == 1
    np.testing.assert_allclose(ang[sel], 0.3 * xs[sel] / np.hypot(xs, ys)[sel])


def test_rotating_profile_values():
    pts = np.array([[1.0, 0.0], [0.0, 2.0]])
    np.testing.assert_allclose(rotating_exact(pts, 0.0, 1.0, 0.3), [0.3, 0.0])
    t = np.pi / 2
    got = rotating_exact(np.array([[0.0, 1.0]]), t, 1.0, 0.3)
    assert got[0] == pytest.approx(0.3 + t)


def test_rotating_profile_is_constant_along_rotated_rays():
    # Following a material point of the rotating frame only accrues c0 * t.
    p0 = np.array([[1.3, 0.4]])
    for t in (0.3, 1.1):
        rot = np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])
        pt = p0 @ rot.T
        assert rotating_exact(pt, t, 1.0, 0.3)[0] == pytest.approx(
            rotating_exact(p0, 0.0, 1.0, 0.3)[0] + t)


def test_run_scenario_applies_overrides():
    result = run_scenario(catalog()["annulus_constant"], h=0.1, t_end=0.05,
                          epsilon=0.02, scheme="central", snapshot_every=0.025)
    assert result.grid.h == 0.1
    assert result.params.epsilon == 0.02
    assert result.params.scheme == "central"
    times = [t for t, _ in result.snapshots]
    assert times[-1] == pytest.approx(0.05)
    assert len(times) == 3  # t = 0, 0.025, 0.05


def test_checks_evaluate_on_short_run():
    sc = catalog()["annulus_constant"]
    result = run_scenario(sc, t_end=1.0)
    passed, details = evaluate_checks(sc, result)
    assert set(passed) == set(sc.checks)
    assert passed["barrier"] is True
    assert all(isinstance(v, str) and v for v in details.values())


def test_unknown_check_name_is_rejected():
    sc = catalog()["annulus_constant"]
    bad = dataclasses.replace(sc, checks=("no_such_check",))
    result = run_scenario(bad, t_end=0.01)
    with pytest.raises(ValueError):
        evaluate_checks(bad, result)
