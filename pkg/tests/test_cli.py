import os

import pytest
from click.testing import CliRunner

from ciprio.cli import main


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def synth_csv(tmp_path, runner):
    path = tmp_path / "synth.csv"
    result = runner.invoke(
        main,
        ["synth", "--tests", "8", "--cycles", "35", "--fail-fraction", "0.25",
         "--seed", "4", "--out", str(path)],
    )
    assert result.exit_code == 0, result.output
    return path


def test_synth_then_stats(runner, synth_csv):
    result = runner.invoke(main, ["stats", str(synth_csv)])
    assert result.exit_code == 0, result.output
    header, row = result.output.strip().splitlines()
    assert header == "distinct_tests,commit_count,execution_count,failed_fraction"
    assert row.startswith("8,35,280,")


def test_run_writes_expected_files(runner, synth_csv, tmp_path):
    out = tmp_path / "out"
    result = runner.invoke(
        main,
        ["run", "--agent", "random", "--dataset", str(synth_csv),
         "--iterations", "2", "--seed", "1", "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    for name in ("results.csv", "trend.csv", "napfd.svg", "meta.txt"):
        assert (out / name).exists()
    lines = (out / "results.csv").read_text().splitlines()
    assert lines[0] == "agent,reward,iteration,cycle,napfd,scheduled_count,detected,total_failures"
    assert len(lines) == 1 + 2 * 35


def test_run_is_byte_deterministic(runner, synth_csv, tmp_path):
    outputs = []
    for name in ("a", "b"):
        out = tmp_path / name
        result = runner.invoke(
            main,
            ["run", "--agent", "network", "--dataset", str(synth_csv),
             "--iterations", "1", "--seed", "3", "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        outputs.append((out / "results.csv").read_bytes())
    assert outputs[0] == outputs[1]


def test_run_rejects_unknown_agent(runner, synth_csv, tmp_path):
    result = runner.invoke(
        main,
        ["run", "--agent", "psychic", "--dataset", str(synth_csv),
         "--out", str(tmp_path / "x")],
    )
    assert result.exit_code != 0
    assert "error:" in result.output


def test_run_rejects_unknown_reward(runner, synth_csv, tmp_path):
    result = runner.invoke(
        main,
        ["run", "--reward", "karma", "--dataset", str(synth_csv),
         "--out", str(tmp_path / "x")],
    )
    assert result.exit_code != 0


def test_compare_writes_diff_files(runner, synth_csv, tmp_path):
    out = tmp_path / "cmp"
    result = runner.invoke(
        main,
        ["compare", "--agent", "network", "--baseline", "random",
         "--dataset", str(synth_csv), "--iterations", "1", "--seed", "2",
         "--group-size", "10", "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    assert (out / "diff_random.csv").exists()
    assert (out / "diff.svg").exists()
    lines = (out / "diff_random.csv").read_text().splitlines()
    assert lines[0] == "group_index,mean_difference"
    assert len(lines) == 1 + 4  # 35 cycles in groups of 10


def test_config_file_fills_defaults_but_flags_win(runner, synth_csv, tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("iterations=2\nseed=9\n# comment\nreward=failcount\n")
    out = tmp_path / "out"
    result = runner.invoke(
        main,
        ["run", "--agent", "random", "--dataset", str(synth_csv),
         "--config", str(cfg), "--seed", "1", "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    meta = (out / "meta.txt").read_text()
    assert "iterations=2" in meta  # from file
    assert "seed=1" in meta  # flag overrides file
    assert "reward=failcount" in meta


def test_config_file_unknown_key(runner, synth_csv, tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("wibble=2\n")
    result = runner.invoke(
        main,
        ["run", "--dataset", str(synth_csv), "--config", str(cfg),
         "--out", str(tmp_path / "x")],
    )
    assert result.exit_code != 0


def test_stats_parse_error_exits_nonzero(runner, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("not,a,header\n")
    result = runner.invoke(main, ["stats", str(bad)])
    assert result.exit_code != 0
