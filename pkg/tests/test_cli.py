"""Command line behavior: exit codes, outputs, round trips."""

from __future__ import annotations

import pytest

from lpcc.cli import main
from lpcc.results import STATS_HEADER


def run_cli(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestRunCommand:
    def test_pram_on_generated_path(self, capsys, tmp_path):
        out = tmp_path / "labels.tsv"
        stats = tmp_path / "stats.csv"
        code, stdout, _ = run_cli(
            capsys, "run", "--engine", "pram", "--gen", "seqpath:6",
            "--out", str(out), "--stats", str(stats),
        )
        assert code == 0
        assert "components=1 " in stdout
        assert "steps=" in stdout and "wall=" in stdout
        lines = out.read_text().splitlines()
        assert len(lines) == 64
        assert lines[0] == "1\t1" and lines[-1] == "64\t1"
        assert stats.read_text().splitlines()[0] == STATS_HEADER

    @pytest.mark.parametrize("extra", [
        ["--engine", "stream", "--backend", "file", "--no-dedup"],
        ["--engine", "mapreduce", "--reducers", "4"],
    ])
    def test_other_engines(self, capsys, extra):
        code, stdout, _ = run_cli(capsys, "run", "--gen", "starpair:3:4", *extra)
        assert code == 0
        assert "components=1 steps=" in stdout

    def test_threads_do_not_change_output(self, capsys, tmp_path):
        files = []
        for threads in ("1", "4"):
            path = tmp_path / f"labels{threads}.tsv"
            code, _, _ = run_cli(
                capsys, "run", "--engine", "pram", "--gen", "path:n=500:seed=11",
                "--threads", threads, "--out", str(path),
            )
            assert code == 0
            files.append(path.read_bytes())
        assert files[0] == files[1]

    def test_step_cap_is_engine_error(self, capsys):
        code, _, stderr = run_cli(
            capsys, "run", "--engine", "pram", "--gen", "seqpath:10",
            "--max-steps", "1",
        )
        assert code == 3
        assert "engine error" in stderr

    def test_missing_input_file(self, capsys, tmp_path):
        code, _, stderr = run_cli(
            capsys, "run", "--engine", "pram", "--input", str(tmp_path / "nope.txt"),
        )
        assert code == 2
        assert "error" in stderr

    def test_malformed_input_file(self, capsys, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("1 2\n3 elephant\n")
        code, _, stderr = run_cli(
            capsys, "run", "--engine", "stream", "--input", str(bad),
        )
        assert code == 2
        assert "line 2" in stderr

    def test_overshoot_warning_on_cycle(self, capsys, tmp_path):
        n = 48
        path = tmp_path / "cycle.txt"
        path.write_text("".join(f"{i} {i % n + 1}\n" for i in range(1, n + 1)))
        code, stdout, stderr = run_cli(
            capsys, "run", "--engine", "stream", "--input", str(path),
        )
        assert code == 0
        assert "components=1" in stdout
        assert "exceeded 2m=96" in stderr


class TestFlagValidation:
    @pytest.mark.parametrize("argv", [
        ["run", "--engine", "pram", "--gen", "seqpath:4", "--no-dedup"],
        ["run", "--engine", "stream", "--gen", "seqpath:4", "--threads", "2"],
        ["run", "--engine", "stream", "--gen", "seqpath:4", "--eager-labels"],
        ["run", "--engine", "mapreduce", "--gen", "seqpath:4", "--backend", "file"],
        ["run", "--engine", "pram", "--gen", "seqpath:4", "--reducers", "2"],
        ["run", "--engine", "pram"],
        ["run", "--engine", "warp", "--gen", "seqpath:4"],
        ["frobnicate"],
    ])
    def test_usage_errors_exit_2(self, capsys, argv):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2

    def test_bad_gen_spec_exits_2(self, capsys):
        code, _, stderr = run_cli(
            capsys, "run", "--engine", "pram", "--gen", "moebius:7",
        )
        assert code == 2
        assert "error" in stderr


class TestGenVerifyRoundTrip:
    def test_round_trip(self, capsys, tmp_path):
        edges = tmp_path / "graph.txt"
        labels = tmp_path / "labels.tsv"
        code, stdout, _ = run_cli(
            capsys, "gen", "--spec", "path:n=120:seed=5", "--out", str(edges),
        )
        assert code == 0
        assert "wrote 120 vertices, 119 edges" in stdout

        code, _, _ = run_cli(
            capsys, "run", "--engine", "mapreduce", "--input", str(edges),
            "--out", str(labels),
        )
        assert code == 0

        code, stdout, _ = run_cli(
            capsys, "verify", "--input", str(edges), "--labels", str(labels),
        )
        assert code == 0
        assert "verification OK" in stdout
        assert "1 components" in stdout

    def test_verify_rejects_wrong_labels(self, capsys, tmp_path):
        edges = tmp_path / "graph.txt"
        edges.write_text("1 2\n2 3\n")
        labels = tmp_path / "labels.tsv"
        labels.write_text("1\t1\n2\t1\n3\t3\n")
        code, _, stderr = run_cli(
            capsys, "verify", "--input", str(edges), "--labels", str(labels),
        )
        assert code == 1
        assert "verification failed" in stderr
        assert "vertex 3" in stderr

    def test_verify_rejects_wrong_universe(self, capsys, tmp_path):
        edges = tmp_path / "graph.txt"
        edges.write_text("1 2\n")
        labels = tmp_path / "labels.tsv"
        labels.write_text("1\t1\n2\t1\n3\t1\n")
        code, _, stderr = run_cli(
            capsys, "verify", "--input", str(edges), "--labels", str(labels),
        )
        assert code == 1


class TestBench:
    def test_quick_passes(self, capsys, tmp_path):
        csv = tmp_path / "bench.csv"
        code, stdout, _ = run_cli(
            capsys, "bench", "--quick", "--verify-oracle", "--out", str(csv),
        )
        assert code == 0
        assert "seqpath16" in stdout
        assert "PASS" in stdout
        lines = csv.read_text().splitlines()
        assert lines[0] == "graph,n,m,components,steps,wall_s,verdict"
        assert lines[1].startswith("seqpath16,65536,65535,1,")

    def test_missing_datasets_are_skipped(self, capsys, tmp_path):
        code, stdout, _ = run_cli(
            capsys, "bench", "--quick",
        )
        assert code == 0
        assert "FAIL" not in stdout
