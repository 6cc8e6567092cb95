"""Scenario config validation and the command-line front end."""

import math
from pathlib import Path

import numpy as np
import pytest

from gravlink import __version__
from gravlink.cli import main
from gravlink.config import load_config, validate_config
from gravlink.errors import ConfigInvalid, FileUnreadable

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"
SCENARIO_FILES = sorted(SCENARIOS.glob("*.yaml"))


def write_yaml(tmp_path, text, name="scenario.yaml"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


MULTI_PROBLEM = """
mode: redshift-pass
orbit:
  semi_major_axis_m: 6.771e+6
  ephemeris_path: x.cpf
station:
  longitude_deg: 0.0
optical:
  wavelength_m: -800.0e-9
  delay_length_m: 6000.0
sweep:
  t_start_s: 0.0
  t_end_s: -10.0
  n_epochs: 1
"""

SMALL_PASS = """
mode: redshift-pass
output_dir: {out}
orbit:
  semi_major_axis_m: 6.771e+6
station:
  latitude_deg: 0.0
  longitude_deg: 0.0
optical:
  wavelength_m: 800.0e-9
  delay_length_m: 6000.0
sweep:
  t_start_s: -60.0
  t_end_s: 60.0
  n_epochs: 12
"""

SMALL_FORECAST = """
mode: alpha-forecast
seed: 11
output_dir: {out}
orbit:
  semi_major_axis_m: 6.771e+6
station:
  latitude_deg: 0.0
  longitude_deg: 0.0
optical:
  wavelength_m: 800.0e-9
  delay_length_m: 6000.0
sweep:
  t_start_s: -240.0
  t_end_s: 240.0
  n_epochs: 6
redshift:
  alpha: 3.0e-4
noise:
  photon_budget: 96000
forecast:
  trials: 10
  scan_points: 8
"""

SMALL_FRINGE = """
mode: fringe-demo
seed: 7
output_dir: {out}
fringe:
  base_phase_rad: 0.7
  scan_points: 8
  n_per_point: 20000
noise:
  visibility: {vis}
"""

SMALL_WEAKVALUE = """
mode: weakvalue-scan
output_dir: {out}
spin:
  theta_grid_deg: [30.0, 84.0]
  q_grid: [1.0e-3, 1.0e-1]
"""


class TestValidateConfig:
    @pytest.mark.parametrize(
        "scenario", SCENARIO_FILES, ids=lambda p: p.name
    )
    def test_shipped_scenarios_are_valid(self, scenario):
        assert validate_config(str(scenario)) == []

    def test_shipped_scenario_count(self):
        assert len(SCENARIO_FILES) >= 6

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileUnreadable):
            validate_config(str(tmp_path / "absent.yaml"))

    def test_broken_yaml(self, tmp_path):
        path = write_yaml(tmp_path, "mode: [unterminated\n")
        problems = validate_config(path)
        assert len(problems) == 1
        assert "not valid YAML" in problems[0]

    def test_non_mapping_top_level(self, tmp_path):
        path = write_yaml(tmp_path, "- 1\n- 2\n")
        problems = validate_config(path)
        assert "must be a mapping" in problems[0]

    def test_collects_every_violation(self, tmp_path):
        problems = validate_config(write_yaml(tmp_path, MULTI_PROBLEM))
        text = "\n".join(problems)
        assert "exclusive" in text
        assert "station.latitude_deg" in text
        assert "optical.wavelength_m" in text
        assert "t_start_s" in text
        assert "sweep.n_epochs" in text
        assert len(problems) >= 5

    def test_stochastic_mode_requires_seed(self, tmp_path):
        cfg = SMALL_FORECAST.format(out="out").replace("seed: 11\n", "")
        cfg = cfg.replace("trials: 10", "trials: 5")
        problems = validate_config(write_yaml(tmp_path, cfg))
        text = "\n".join(problems)
        assert "seed: required for stochastic mode" in text
        assert "forecast.trials" in text

    def test_unknown_mode(self, tmp_path):
        problems = validate_config(write_yaml(tmp_path, "mode: warp-drive\n"))
        assert any(p.startswith("mode:") for p in problems)

    def test_spin_grid_shapes(self, tmp_path):
        bad = """
mode: weakvalue-scan
spin:
  theta_grid_deg: {start: 0.0, stop: 85.0}
  q_grid: [0.1, -0.2]
"""
        problems = validate_config(write_yaml(tmp_path, bad))
        text = "\n".join(problems)
        assert "theta_grid_deg.num" in text
        assert "q_grid" in text


class TestLoadConfig:
    def test_shipped_pass_roundtrip(self, monkeypatch):
        monkeypatch.delenv("GRAVLINK_OUTPUT_DIR", raising=False)
        cfg = load_config(str(SCENARIOS / "redshift_pass.yaml"))
        assert cfg.mode == "redshift-pass"
        assert cfg.orbit.semi_major_axis == 6.771e6
        assert cfg.orbit.ephemeris_path is None
        assert cfg.station.latitude == 0.0
        assert cfg.optical.lambda0 == 800e-9
        assert cfg.sweep.n_epochs == 100
        assert cfg.redshift.alpha == 0.0
        assert cfg.output_dir == "out/redshift_pass"

    def test_angles_arrive_in_radians(self, tmp_path, monkeypatch):
        monkeypatch.delenv("GRAVLINK_OUTPUT_DIR", raising=False)
        text = SMALL_PASS.format(out="out").replace(
            "latitude_deg: 0.0", "latitude_deg: 45.0"
        ).replace("semi_major_axis_m: 6.771e+6",
                  "semi_major_axis_m: 6.771e+6\n  inclination_deg: 51.6")
        cfg = load_config(write_yaml(tmp_path, text))
        assert cfg.station.latitude == pytest.approx(math.radians(45.0))
        assert cfg.orbit.inclination == pytest.approx(math.radians(51.6))

    def test_spin_theta_grid_degrees(self, tmp_path, monkeypatch):
        monkeypatch.delenv("GRAVLINK_OUTPUT_DIR", raising=False)
        cfg = load_config(write_yaml(tmp_path, SMALL_WEAKVALUE.format(out="out")))
        assert cfg.spin.theta_grid == pytest.approx(
            (math.radians(30.0), math.radians(84.0))
        )
        assert cfg.spin.q_grid == (1e-3, 1e-1)

    def test_invalid_raises_with_violation_list(self, tmp_path):
        with pytest.raises(ConfigInvalid) as err:
            load_config(write_yaml(tmp_path, MULTI_PROBLEM))
        assert len(err.value.violations) >= 5

    def test_env_overrides_output_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv("GRAVLINK_OUTPUT_DIR", str(tmp_path / "elsewhere"))
        cfg = load_config(str(SCENARIOS / "redshift_pass.yaml"))
        assert cfg.output_dir == str(tmp_path / "elsewhere")


class TestCliBasics:
    def test_constants_command(self, capsys):
        assert main(["constants"]) == 0
        out = capsys.readouterr().out
        lines = out.strip().splitlines()
        assert len(lines) == 4
        assert "acceleration_energy_scale" in out
        assert "rotation_to_acceleration_ratio" in out

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["--version"])
        assert err.value.code == 0
        assert __version__ in capsys.readouterr().out

    def test_subcommand_required(self):
        with pytest.raises(SystemExit) as err:
            main([])
        assert err.value.code == 2

    def test_validate_ok(self, capsys):
        assert main(["validate", str(SCENARIOS / "constants.yaml")]) == 0
        assert "config valid" in capsys.readouterr().out

    def test_validate_reports_violations(self, tmp_path, capsys):
        path = write_yaml(tmp_path, MULTI_PROBLEM)
        assert main(["validate", path]) == 2
        err = capsys.readouterr().err
        assert err.count("violation: ") >= 5

    def test_validate_missing_file(self, tmp_path, capsys):
        assert main(["validate", str(tmp_path / "absent.yaml")]) == 2
        assert "error[FileUnreadable]" in capsys.readouterr().err

    def test_run_rejects_bad_config(self, tmp_path, capsys):
        path = write_yaml(tmp_path, MULTI_PROBLEM)
        assert main(["run", path]) == 2
        assert "violation: " in capsys.readouterr().err

    def test_run_missing_file(self, tmp_path, capsys):
        assert main(["run", str(tmp_path / "absent.yaml")]) == 2
        assert "error[FileUnreadable]" in capsys.readouterr().err


class TestCliRuns:
    def test_constants_mode_writes_table(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("GRAVLINK_OUTPUT_DIR", str(tmp_path / "out"))
        assert main(["run", str(SCENARIOS / "constants.yaml")]) == 0
        table = (tmp_path / "out" / "constants.txt").read_text()
        assert "equivalent_magnetic_field" in table
        assert "rotation_to_acceleration_ratio" in capsys.readouterr().out

    def test_redshift_pass_outputs(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("GRAVLINK_OUTPUT_DIR", str(tmp_path / "out"))
        path = write_yaml(tmp_path, SMALL_PASS.format(out="ignored"))
        assert main(["run", path]) == 0
        sweep = np.loadtxt(tmp_path / "out" / "pass_sweep.txt")
        assert sweep.shape == (12, 8)
        summary = (tmp_path / "out" / "summary.txt").read_text()
        assert "Doppler-to-gravity phase ratio" in summary
        assert "Doppler-to-gravity phase ratio" in capsys.readouterr().out

    def test_ephemeris_driven_pass(self, tmp_path, monkeypatch):
        monkeypatch.setenv("GRAVLINK_OUTPUT_DIR", str(tmp_path / "out"))
        assert main(["run", str(SCENARIOS / "ephemeris_pass.yaml")]) == 0
        sweep = np.loadtxt(tmp_path / "out" / "pass_sweep.txt")
        assert sweep.shape == (60, 8)

    def test_alpha_forecast_outputs(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("GRAVLINK_OUTPUT_DIR", str(tmp_path / "out"))
        path = write_yaml(tmp_path, SMALL_FORECAST.format(out="ignored"))
        assert main(["run", path]) == 0
        trials = (tmp_path / "out" / "forecast_trials.txt").read_text()
        assert trials.startswith("# trial")
        out = capsys.readouterr().out
        assert "sigma_alpha empirical" in out
        assert "photon budget for sigma_alpha" in out

    def test_weakvalue_scan_outputs(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("GRAVLINK_OUTPUT_DIR", str(tmp_path / "out"))
        path = write_yaml(tmp_path, SMALL_WEAKVALUE.format(out="ignored"))
        assert main(["run", path]) == 0
        rows = np.loadtxt(tmp_path / "out" / "weakvalue_scan.txt")
        assert rows.shape == (4, 7)
        assert "max |Re weak value|" in capsys.readouterr().out

    def test_fringe_demo_byte_identical_reruns(self, tmp_path, monkeypatch):
        path = write_yaml(tmp_path, SMALL_FRINGE.format(out="ignored", vis="1.0"))
        monkeypatch.setenv("GRAVLINK_OUTPUT_DIR", str(tmp_path / "a"))
        assert main(["run", path]) == 0
        monkeypatch.setenv("GRAVLINK_OUTPUT_DIR", str(tmp_path / "b"))
        assert main(["run", path]) == 0
        first = (tmp_path / "a" / "fringe_scan.txt").read_bytes()
        second = (tmp_path / "b" / "fringe_scan.txt").read_bytes()
        assert first == second

    def test_fringe_partial_failure_is_reported_not_fatal(
        self, tmp_path, monkeypatch, capsys
    ):
        # zero visibility leaves the phase unidentifiable; the step is
        # marked failed in the summary but the run still completes
        cfg = SMALL_FRINGE.format(out="ignored", vis="0.0")
        cfg = cfg.replace("n_per_point: 20000", "n_per_point: 50000")
        path = write_yaml(tmp_path, cfg)
        monkeypatch.setenv("GRAVLINK_OUTPUT_DIR", str(tmp_path / "out"))
        assert main(["run", path]) == 0
        summary = (tmp_path / "out" / "summary.txt").read_text()
        assert "[FAILED] fringe fit: DegenerateVisibility" in summary
        assert (tmp_path / "out" / "fringe_scan.txt").exists()

    def test_runtime_failure_exits_three(self, tmp_path, monkeypatch, capsys):
        (tmp_path / "empty.cpf").write_text("", encoding="utf-8")
        cfg = SMALL_PASS.format(out="ignored").replace(
            "semi_major_axis_m: 6.771e+6", "ephemeris_path: empty.cpf"
        )
        path = write_yaml(tmp_path, cfg)
        monkeypatch.setenv("GRAVLINK_OUTPUT_DIR", str(tmp_path / "out"))
        assert main(["run", path]) == 3
        assert "error[EmptyEphemeris]" in capsys.readouterr().err
