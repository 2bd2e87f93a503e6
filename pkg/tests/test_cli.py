"""Command-line interface: subcommands, output layout, exit codes."""

import json
from pathlib import Path

import pytest

from tendonsim.cli import main

CONFIG_DIR = Path(__file__).resolve().parent.parent / "src" / "tendonsim" / "configs"


@pytest.fixture()
def short_step_config(tmp_path):
    path = tmp_path / "step.yaml"
    path.write_text(
        f"include: {CONFIG_DIR / 'step_response.yaml'}\n"
        "duration: 2 s\n"
        "step:\n  time: 0.5 s\n  target: 20 deg\n  initial_angle: 5 deg\n"
    )
    return path


class TestRun:
    def test_happy_path_writes_four_files(self, tmp_path, short_step_config, capsys):
        out = tmp_path / "out"
        code = main(["run", str(short_step_config), "--out", str(out), "--quiet"])
        assert code == 0
        names = sorted(p.name for p in out.iterdir())
        assert names == ["manifest.json", "plot.svg", "series.csv", "summary.json"]
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["kind"] == "step_response"
        assert len(manifest["run_id"]) == 16

    def test_rerun_is_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        cfg = CONFIG_DIR / "friction_sweep.yaml"
        assert main(["run", str(cfg), "--out", str(out1), "--quiet"]) == 0
        assert main(["run", str(cfg), "--out", str(out2), "--quiet"]) == 0
        assert (out1 / "series.csv").read_bytes() == (out2 / "series.csv").read_bytes()
        assert (out1 / "summary.json").read_bytes() == (out2 / "summary.json").read_bytes()
        assert (out1 / "plot.svg").read_bytes() == (out2 / "plot.svg").read_bytes()

    def test_seed_override_changes_noisy_output(self, tmp_path):
        cfg_path = tmp_path / "noisy.yaml"
        cfg_path.write_text(
            f"include: {CONFIG_DIR / 'friction_sweep.yaml'}\n" "sweep:\n  noise: 0.05\n"
        )
        out1, out2 = tmp_path / "s0", tmp_path / "s1"
        main(["run", str(cfg_path), "--out", str(out1), "--seed", "0", "--quiet"])
        main(["run", str(cfg_path), "--out", str(out2), "--seed", "1", "--quiet"])
        assert (out1 / "series.csv").read_bytes() != (out2 / "series.csv").read_bytes()

    def test_config_error_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.yaml"
        bad.write_text(
            f"include: {CONFIG_DIR / 'friction_sweep.yaml'}\n" "dt: 0 s\n"
        )
        code = main(["run", str(bad), "--out", str(tmp_path / "out"), "--quiet"])
        assert code == 2
        report = json.loads(capsys.readouterr().err.strip())
        assert report["error"] == "ConfigError"
        assert "dt" in report["message"]

    def test_jobs_flag_accepted(self, tmp_path):
        out = tmp_path / "out"
        code = main(["run", str(CONFIG_DIR / "friction_sweep.yaml"), "--out", str(out), "--jobs", "4", "--quiet"])
        assert code == 0

    def test_scenario_error_exit_3(self, tmp_path, short_step_config, capsys):
        # an anomaly threshold below the holding torque trips the safety stop
        tripping = tmp_path / "tripping.yaml"
        tripping.write_text(
            f"include: {short_step_config}\n"
            "controller:\n"
            "  anomaly:\n"
            "    current_spike_threshold: 1.0e-4\n"
            "    encoder_motion_floor: 1.0e-6\n"
            "    window: 10 ms\n"
        )
        code = main(["run", str(tripping), "--out", str(tmp_path / "out"), "--quiet"])
        assert code == 3
        assert json.loads(capsys.readouterr().err.strip())["error"] == "ScenarioError"


class TestFit:
    def test_round_trip_from_sweep(self, tmp_path, capsys):
        out = tmp_path / "sweep"
        main(["run", str(CONFIG_DIR / "friction_sweep.yaml"), "--out", str(out), "--quiet"])
        code = main(["fit", str(out / "series.csv"), "--out", str(tmp_path / "fit.csv")])
        assert code == 0
        rows = {}
        for line in (tmp_path / "fit.csv").read_text().splitlines()[1:]:
            cells = line.split(",")
            rows[cells[0]] = float(cells[1])
        # the 9-digit CSV round trip costs a little precision; still within 1e-9
        assert rows["metal_spring_tube"] == pytest.approx(0.10, abs=1e-9)
        assert rows["ptfe_tube"] == pytest.approx(0.22, abs=1e-9)
        stdout = capsys.readouterr().out
        assert "ptfe_tube" in stdout

    def test_empty_csv_exit_4(self, tmp_path, capsys):
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        code = main(["fit", str(empty)])
        assert code == 4
        assert json.loads(capsys.readouterr().err.strip())["error"] == "CsvSchemaError"

    def test_single_angle_exit_4(self, tmp_path, capsys):
        csv = tmp_path / "one.csv"
        csv.write_text(
            "sheath_type,wrap_angle_deg,disk_diameter_mm,mean_tension_N,std_tension_N,load_N\n"
            "a,90,50,21.0,0,19.6\n"
            "a,90,50,21.1,0,19.6\n"
            "a,90,50,21.2,0,19.6\n"
        )
        code = main(["fit", str(csv)])
        assert code == 4
        assert json.loads(capsys.readouterr().err.strip())["error"] == "DegenerateData"


class TestHandDescribe:
    def test_table_contents(self, capsys):
        assert main(["hand", "describe"]) == 0
        out = capsys.readouterr().out
        lines = [line for line in out.splitlines() if line.strip()]
        assert len(lines) == 21
        normalized = " ".join(out.split())
        assert "Middle MCP A-A 100" in normalized
        assert "Thumb MCP F-E 85" in normalized
        assert "/" not in out  # absent joints simply do not appear

    def test_exactly_one_antagonistic_row(self, capsys):
        main(["hand", "describe"])
        out = capsys.readouterr().out
        assert out.count("antagonistic") == 1
        assert out.count("spring_return") == 20


class TestValidate:
    def test_valid_config(self, capsys):
        assert main(["validate", str(CONFIG_DIR / "sine_tracking.yaml")]) == 0
        assert "ok:" in capsys.readouterr().out

    def test_invalid_config_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.yaml"
        bad.write_text("schema_version: 1\nkind: step_response\nduration: -1 s\ndt: 1 ms\n")
        assert main(["validate", str(bad)]) == 2
        assert json.loads(capsys.readouterr().err.strip())["error"] == "ConfigError"

    def test_missing_file_exit_2(self, tmp_path, capsys):
        assert main(["validate", str(tmp_path / "missing.yaml")]) == 2
