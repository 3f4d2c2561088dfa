"""End-to-end command-line behavior, exercised in process via cli.main."""

import json

import pytest

from volex.cli import _config_from_args, build_parser, main
from volex.simulator import read_metrics_csv


def run_args(tmp_path, *extra):
    """A tiny empty-world run that completes in a few iterations."""
    return [
        "run", "--env", "empty", "--extent", "1.2x1.2x0.6", "--res", "0.3",
        "--robots", "2", "--perturb", "0.2", "--seed", "1",
        "--horizon", "3", "--samples", "80", "--cp", "1.0",
        "--view-threshold", "3", "--dist-factor", "5", "--discount", "0.7",
        "--view-samples", "32", "--iters", "30", "--completion", "1.0",
        "--out", str(tmp_path / "run.csv"), *extra,
    ]


class TestUsage:
    def test_unknown_choice_exits_64(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["run", "--env", "cave"])
        assert excinfo.value.code == 64

    def test_missing_command_exits_64(self):
        with pytest.raises(SystemExit) as excinfo:
            main([])
        assert excinfo.value.code == 64


class TestDefaults:
    def parse(self, *argv):
        return _config_from_args(build_parser().parse_args(["run", *argv]))

    def test_sequential_planner_parameter_set(self):
        config = self.parse("--planner", "sequential")
        assert config.planner.horizon == 10
        assert config.planner.mcts_samples == 200
        assert config.planner.exploration_weight == 1500.0
        assert config.view_threshold == 900.0
        assert config.dist_factor == 500.0
        assert config.objective.discount == 0.7
        assert config.objective.weighting == "scaled-entropy"
        assert config.objective.env_mode == "optimistic"

    def test_myopic_planner_swaps_goal_shaping(self):
        config = self.parse("--planner", "myopic")
        assert config.view_threshold == 300.0
        assert config.dist_factor == 700.0
        assert config.objective.discount == 1.0

    def test_explicit_flags_beat_planner_defaults(self):
        config = self.parse("--planner", "myopic", "--discount", "0.5",
                            "--dist-factor", "9")
        assert config.objective.discount == 0.5
        assert config.dist_factor == 9.0

    def test_seed_falls_back_to_the_environment(self, monkeypatch):
        monkeypatch.setenv("VOLEX_SEED", "11")
        assert self.parse().master_seed == 11
        assert self.parse("--seed", "4").master_seed == 4
        monkeypatch.delenv("VOLEX_SEED")
        assert self.parse().master_seed == 0


class TestEnvCommands:
    def test_gen_and_info_on_an_empty_hall(self, tmp_path, capsys):
        path = tmp_path / "hall.vox"
        assert main(["env", "gen", "empty", "--extent", "10x10x5",
                     "--res", "0.1", "--out", str(path)]) == 0
        assert "wrote" in capsys.readouterr().out

        assert main(["env", "info", str(path)]) == 0
        out = capsys.readouterr().out
        assert "dims: 100 x 100 x 50 (500000 cells)" in out
        assert "occupied: 0 cells" in out
        assert "bounding volume: 500 m^3" in out
        assert "explorable from center: 500000 cells (500 m^3)" in out
        assert "hash: " in out

    def test_gen_is_deterministic(self, tmp_path, capsys):
        argv = ["env", "gen", "boxes", "--extent", "2.4x2.4x0.9",
                "--res", "0.3", "--boxes", "3", "--box-size", "0.3,0.6",
                "--seed", "12"]
        assert main(argv + ["--out", str(tmp_path / "a.vox")]) == 0
        assert main(argv + ["--out", str(tmp_path / "b.vox")]) == 0
        capsys.readouterr()
        blob = (tmp_path / "a.vox").read_bytes()
        assert blob == (tmp_path / "b.vox").read_bytes()
        assert blob  # boxes actually landed

    def test_missing_file_exits_1(self, tmp_path, capsys):
        assert main(["env", "info", str(tmp_path / "nowhere.vox")]) == 1
        assert capsys.readouterr().err.startswith("volex:")


class TestRun:
    def test_complete_run_exits_0_and_writes_artifacts(self, tmp_path, capsys):
        assert main(run_args(tmp_path)) == 0
        out = capsys.readouterr().out
        assert out.startswith("complete: 32/32 cells")
        assert (tmp_path / "run.csv").exists()
        assert (tmp_path / "run.json").exists()  # default manifest path

    def test_budget_exhaustion_exits_2(self, tmp_path, capsys):
        code = main(["run", "--env", "empty", "--extent", "2.4x0.3x0.3",
                     "--res", "0.3", "--robots", "1", "--perturb", "0",
                     "--seed", "3", "--horizon", "3", "--samples", "60",
                     "--cp", "1.0", "--view-threshold", "5",
                     "--dist-factor", "0", "--view-samples", "16",
                     "--iters", "1", "--completion", "1.0",
                     "--out", str(tmp_path / "short.csv")])
        assert code == 2
        assert capsys.readouterr().out.startswith("budget exhausted:")

    def test_run_from_a_voxel_file(self, tmp_path, capsys):
        path = tmp_path / "world.vox"
        main(["env", "gen", "boxes", "--extent", "2.4x2.4x0.9",
              "--res", "0.3", "--boxes", "3", "--box-size", "0.3,0.6",
              "--seed", "12", "--out", str(path)])
        code = main(["run", "--env", "file", "--env-path", str(path),
                     "--res", "0.3", "--robots", "1", "--perturb", "0",
                     "--seed", "3", "--horizon", "3", "--samples", "40",
                     "--cp", "3.0", "--view-threshold", "3",
                     "--dist-factor", "5", "--view-samples", "16",
                     "--iters", "1", "--completion", "1.0",
                     "--out", str(tmp_path / "file.csv")])
        capsys.readouterr()
        assert code == 2

    def test_missing_voxel_file_exits_1(self, tmp_path, capsys):
        code = main(["run", "--env", "file", "--env-path",
                     str(tmp_path / "gone.vox"),
                     "--out", str(tmp_path / "x.csv")])
        assert code == 1
        assert capsys.readouterr().err.startswith("volex:")

    def test_manifest_rerun_is_byte_identical(self, tmp_path, capsys):
        assert main(run_args(tmp_path, "--zero-timing")) == 0
        rerun = tmp_path / "rerun.csv"
        assert main(["run", "--from-manifest", str(tmp_path / "run.json"),
                     "--out", str(rerun)]) == 0
        threaded = tmp_path / "threaded.csv"
        assert main(["run", "--from-manifest", str(tmp_path / "run.json"),
                     "--threads", "4", "--out", str(threaded)]) == 0
        capsys.readouterr()
        blob = (tmp_path / "run.csv").read_bytes()
        assert rerun.read_bytes() == blob
        assert threaded.read_bytes() == blob
        original = json.loads((tmp_path / "run.json").read_text())
        repeated = json.loads((tmp_path / "rerun.json").read_text())
        assert repeated["environment_hash"] == original["environment_hash"]
        assert repeated["result"] == original["result"]

    def test_environment_hash_mismatch_exits_1(self, tmp_path, capsys):
        assert main(run_args(tmp_path, "--zero-timing")) == 0
        manifest = json.loads((tmp_path / "run.json").read_text())
        manifest["environment_hash"] = "0" * 16
        tampered = tmp_path / "tampered.json"
        tampered.write_text(json.dumps(manifest))
        code = main(["run", "--from-manifest", str(tampered),
                     "--out", str(tmp_path / "again.csv")])
        captured = capsys.readouterr()
        assert code == 1
        assert "hash mismatch" in captured.err

    def test_round_robin_run_writes_a_monotone_series(self, tmp_path, capsys):
        code = main(["run", "--env", "empty", "--extent", "4x4x2",
                     "--robots", "4", "--planner", "rsp", "--rounds", "3",
                     "--seed", "7", "--out", str(tmp_path / "rsp.csv")])
        capsys.readouterr()
        assert code == 0
        records = read_metrics_csv(tmp_path / "rsp.csv")
        assert len(records) >= 4
        covered = [r.covered_cells for r in records]
        assert covered == sorted(covered)
        assert all(r.robot_iterations == 4 * r.iteration for r in records)


class TestVerifyCommand:
    def test_one_suite_runs_and_reports(self, capsys):
        assert main(["verify", "--suite", "monotonicity",
                     "--instances", "2", "--seed", "0"]) == 0
        assert "monotonicity: 2/2 pass" in capsys.readouterr().out
