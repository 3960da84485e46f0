import json
from pathlib import Path
from typing import Any

import pytest
from typer.testing import CliRunner

from rovtrack.cli import app

KICK = {"t": 0.0, "wrench": [0.0, 0.0, 0.0, 0.0, 1000.0, 0.0]}


@pytest.fixture(name="runner")
def runner_fixture() -> CliRunner:
    return CliRunner(env={"ROVTRACK_THREADS": "1"})


def write_json(filepath: Path, document: dict[str, Any]) -> Path:
    filepath.write_text(json.dumps(document))
    return filepath


@pytest.fixture(name="quick_filepath")
def quick_filepath_fixture(tmp_path: Path) -> Path:
    return write_json(tmp_path / "quick.json", {"integrator": {"dt": 0.01, "tf": 0.5}})


@pytest.fixture(name="kicked_filepath")
def kicked_filepath_fixture(tmp_path: Path) -> Path:
    document = {
        "trajectory": {"kind": "custom_hold"},
        "disturbance": {"constant": [0.0] * 6, "schedule": [KICK]},
        "integrator": {"dt": 0.01, "tf": 0.5},
    }
    return write_json(tmp_path / "kicked.json", document)


class TestCli:
    def test_simulate(self, runner: CliRunner, quick_filepath: Path, tmp_path: Path) -> None:
        out_dirpath = tmp_path / "out"
        result = runner.invoke(app, ["simulate", "--config", str(quick_filepath), "--out", str(out_dirpath)])
        assert result.exit_code == 0, result.output
        assert (out_dirpath / "log.csv").exists()
        assert (out_dirpath / "metrics.json").exists()

    def test_missing_config(self, runner: CliRunner, tmp_path: Path) -> None:
        out_dirpath = tmp_path / "out"
        args = ["simulate", "--config", str(tmp_path / "missing.json"), "--out", str(out_dirpath)]
        result = runner.invoke(app, args)
        assert result.exit_code == 2
        assert "not found" in result.output
        assert not out_dirpath.exists()

    def test_compare_needs_two_controllers(self, runner: CliRunner, quick_filepath: Path, tmp_path: Path) -> None:
        args = ["compare", "--config", str(quick_filepath), "--out", str(tmp_path / "out"), "--controllers", "fuzzy"]
        assert runner.invoke(app, args).exit_code == 2

    def test_unknown_controller(self, runner: CliRunner, quick_filepath: Path, tmp_path: Path) -> None:
        args = ["compare", "--config", str(quick_filepath), "--out", str(tmp_path), "--controllers", "fuzzy,pid"]
        result = runner.invoke(app, args)
        assert result.exit_code == 2
        assert "pid" in result.output

    def test_inverted_sweep(self, runner: CliRunner, tmp_path: Path) -> None:
        out_filepath = tmp_path / "surface.csv"
        result = runner.invoke(app, ["fis-surface", "--sweep", "8:0.01:0", "--out", str(out_filepath)])
        assert result.exit_code == 2
        assert not out_filepath.exists()

    def test_fis_surface(self, runner: CliRunner, tmp_path: Path) -> None:
        out_filepath = tmp_path / "surface.csv"
        args = ["fis-surface", "--rulebase", "rotational", "--sweep", "0:0.5:2", "--out", str(out_filepath)]
        result = runner.invoke(app, args)
        assert result.exit_code == 0, result.output
        assert len(out_filepath.read_text().splitlines()) == 6

    def test_singular_attitude_exits_with_simulation_code(
        self, runner: CliRunner, kicked_filepath: Path, tmp_path: Path
    ) -> None:
        result = runner.invoke(app, ["simulate", "--config", str(kicked_filepath), "--out", str(tmp_path / "out")])
        assert result.exit_code == 3

    def test_failing_tune_exits_with_optimization_code(
        self, runner: CliRunner, kicked_filepath: Path, tmp_path: Path
    ) -> None:
        sim = json.loads(kicked_filepath.read_text())
        tune_filepath = write_json(tmp_path / "tune.json", {"pso": {"n": 2, "iters": 1}, "sim": sim})
        result = runner.invoke(app, ["tune", "--config", str(tune_filepath), "--out", str(tmp_path / "out")])
        assert result.exit_code == 4

    def test_invalid_thread_count(self, quick_filepath: Path, tmp_path: Path) -> None:
        runner = CliRunner(env={"ROVTRACK_THREADS": "abc"})
        result = runner.invoke(app, ["simulate", "--config", str(quick_filepath), "--out", str(tmp_path / "out")])
        assert result.exit_code == 2
        assert "ROVTRACK_THREADS" in result.output
