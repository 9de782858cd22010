import json

import numpy as np

from spiralflow import cli


def test_check_reports_static_quantities(tmp_path, capsys):
    code = cli.main(["check", "--scenario", "annulus_constant",
                     "--out", str(tmp_path)])
    assert code == 0
    data = json.loads((tmp_path / "summary.json").read_text())
    assert data["scenario"] == "annulus_constant"
    assert data["C0"] == 2.0
    assert data["K0"] == 1.5
    assert data["growth_bounds"] == [1.5, 6.0]
    assert data["forcing_margin"] is not None
    # static mode never runs the clock
    assert data["Sc_slope"] is None
    assert data["t_end"] == 20.0
    out = capsys.readouterr().out
    assert "C0" in out and "K0" in out


def test_check_masked_scenario_reports_nulls(tmp_path):
    code = cli.main(["check", "--scenario", "pinched_single",
                     "--out", str(tmp_path)])
    assert code == 0
    data = json.loads((tmp_path / "summary.json").read_text())
    assert data["C0"] is None
    assert data["K0"] is None
    assert data["forcing_margin"] is None


def test_run_zero_horizon_writes_artifacts(tmp_path):
    code = cli.main(["run", "--scenario", "annulus_constant",
                     "--h", "0.1", "--t-end", "0", "--out", str(tmp_path)])
    assert code == 0
    for name in ("summary.json", "diagnostics.csv", "heights.vtk",
                 "spirals.csv", "growth.png", "spirals.png", "height.png"):
        assert (tmp_path / name).exists(), name
    assert (tmp_path / "fields_0000.vtk").exists()

    data = json.loads((tmp_path / "summary.json").read_text())
    assert data["h"] == 0.1
    assert data["t_end"] == 0.0
    assert set(data["checks"]) == {"barrier", "growth_bounds_contain_slope"}
    lines = (tmp_path / "diagnostics.csv").read_text().splitlines()
    assert lines[0] == "t,S,min_u,sup_grad,sup_ut,S_over_t"


def test_run_respects_scheme_and_epsilon(tmp_path):
    code = cli.main(["run", "--scenario", "annulus_constant", "--h", "0.1",
                     "--t-end", "0.02", "--epsilon", "0.05",
                     "--scheme", "central", "--snapshot-every", "0.01",
                     "--out", str(tmp_path)])
    assert code == 0
    data = json.loads((tmp_path / "summary.json").read_text())
    assert data["epsilon"] == 0.05
    # snapshots at 0, 0.01, 0.02
    for idx in range(3):
        assert (tmp_path / f"fields_{idx:04d}.vtk").exists()


def test_run_from_scenario_file(tmp_path):
    from spiralflow.scenarios import catalog

    spec_path = tmp_path / "my_case.json"
    spec_path.write_text(json.dumps(catalog()["annulus_constant"].to_json()))
    out = tmp_path / "out"
    code = cli.main(["run", "--scenario", str(spec_path),
                     "--h", "0.1", "--t-end", "0", "--out", str(out)])
    assert code == 0
    assert (out / "summary.json").exists()


def test_unknown_scenario_is_config_error(tmp_path, capsys):
    code = cli.main(["check", "--scenario", "no_such_thing",
                     "--out", str(tmp_path)])
    assert code == 1


def test_bad_flag_is_config_error(tmp_path):
    code = cli.main(["run", "--scenario", "annulus_constant",
                     "--scheme", "sideways", "--out", str(tmp_path)])
    assert code == 1


def test_missing_subcommand_is_config_error():
    assert cli.main([]) == 1
