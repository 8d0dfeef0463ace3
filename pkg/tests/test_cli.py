#!/usr/bin/env pytest
"""Tests for the command-line interface."""
import os
import shutil
import tempfile

from pathlib import Path
from unittest import mock

import pytest

from click.testing import CliRunner

from witt_windows.cli import COMMANDS, EXIT_FAIL, EXIT_PASS, cli, main, run_command
from witt_windows.config import JobConfig
from witt_windows.report import Report


@pytest.fixture
def tempdir():
    tempdir = tempfile.mkdtemp()
    yield tempdir
    if os.path.exists(tempdir):
        shutil.rmtree(tempdir)


@pytest.fixture
def runner():
    return CliRunner()


def test_commands_are_registered():
    assert set(COMMANDS) <= set(cli.commands)


def test_frame_check(runner):
    result = runner.invoke(cli, ["frame-check", "--p", "3", "--a", "2", "--E", "u+3", "--samples", "2"])
    assert result.exit_code == 0, result.output
    assert "# frame" in result.output
    assert result.output.endswith("RESULT overall PASS\n")


def test_ladder(runner):
    args = ["ladder", "--p", "3", "--a", "1", "--E", "u+3", "--rank", "1,1", "--seed", "7"]
    result = runner.invoke(cli, args)
    assert result.exit_code == 0, result.output
    assert "# ladder a=1" in result.output
    assert "RESULT base-change-paths PASS" in result.output
    assert "RESULT overall PASS" in result.output
    again = runner.invoke(cli, args)
    assert again.output == result.output


def test_basechange(runner):
    args = ["basechange", "--p", "3", "--a", "1", "--E", "u+3", "--rank", "1,1", "--matrix", "1,u;3,2"]
    result = runner.invoke(cli, args)
    assert result.exit_code == 0, result.output
    assert "# basechange kappa" in result.output
    assert "RESULT universal.factors PASS" in result.output
    assert "RESULT universal.unique PASS" in result.output
    assert result.output.endswith("RESULT overall PASS\n")


def test_lift(runner):
    args = ["lift", "--p", "3", "--a", "3", "--E", "u+3", "--rank", "1,1", "--matrix", "1,u;0,1"]
    result = runner.invoke(cli, args)
    assert result.exit_code == 0, result.output
    assert "# lift to level 3" in result.output
    assert "RESULT lift-reduces PASS" in result.output


def test_homprobe(runner):
    args = ["homprobe", "--p", "3", "--a", "1", "--N", "3", "--E", "u+3", "--rank", "0,1"]
    result = runner.invoke(cli, args)
    assert result.exit_code == 0, result.output
    assert "# homs: 27 -> 27" in result.output


def test_homprobe_defaults(runner):
    result = runner.invoke(cli, ["homprobe"])
    assert result.exit_code == 0, result.output
    assert "# homs: 27 -> 27" in result.output
    assert "# N: 3" in result.output
    assert "# rank: 0,1" in result.output
    assert "RESULT injective PASS" in result.output


def test_homprobe_keeps_an_explicit_precision(runner):
    result = runner.invoke(cli, ["homprobe", "--N", "4"])
    assert "# N: 4" in result.output
    assert "# homs: 81 -> 27" in result.output


@pytest.mark.parametrize(
    "args",
    [
        ["frame-check", "--p", "4"],
        ["frame-check", "--E", "u+9"],
        ["frame-check", "--E", "u^"],
        ["lift", "--a", "1"],
        ["ladder", "--kind", "dieudonne"],
        ["window-validate", "--rank", "1"],
    ],
)
def test_usage_errors(runner, args):
    result = runner.invoke(cli, args)
    assert result.exit_code == 2
    assert "error:" in result.output


def test_click_rejects_unknown_choices(runner):
    result = runner.invoke(cli, ["selftest", "--tier", "huge"])
    assert result.exit_code == 2


def test_config_file(runner, tmp_path):
    path = tmp_path / "job.conf"
    path.write_text("p = 3\na = 2\nE = u + 3\nsamples = 2\n")
    result = runner.invoke(cli, ["frame-check", "--config", str(path)])
    assert result.exit_code == 0, result.output
    assert "# a: 2" in result.output

    path.write_text("p = 3\nthis is not a pair\n")
    result = runner.invoke(cli, ["frame-check", "--config", str(path)])
    assert result.exit_code == 2
    assert "ConfigError" in result.output


def test_failing_report_exits_one(tempdir):
    def build(cfg):
        report = Report("broken")
        report.check("always", False, "by construction")
        return report

    with mock.patch("appdirs.user_cache_dir", return_value=tempdir):
        assert run_command(JobConfig(), "broken", build) == EXIT_FAIL
        assert run_command(JobConfig(), "fine", lambda cfg: Report("fine")) == EXIT_PASS


@mock.patch("appdirs.user_cache_dir")
def test_cache_is_off_by_default(user_cache_dir_mock, runner, tempdir):
    user_cache_dir_mock.return_value = tempdir
    result = runner.invoke(cli, ["frame-check", "--a", "2", "--samples", "1"])
    assert result.exit_code == 0, result.output
    assert list(Path(tempdir).glob("*.gz")) == []


@mock.patch("appdirs.user_cache_dir")
def test_cached_reports(user_cache_dir_mock, runner, tempdir):
    user_cache_dir_mock.return_value = tempdir
    args = ["frame-check", "--a", "2", "--samples", "1", "--cache-period", "60"]
    first = runner.invoke(cli, args)
    assert first.exit_code == 0, first.output
    assert len(list(Path(tempdir).glob("*.gz"))) == 1
    with mock.patch("witt_windows.cli.check_frame_axioms") as check:
        second = runner.invoke(cli, args)
    check.assert_not_called()
    assert second.output == first.output


def test_main(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["frame-check", "--p", "3", "--a", "2", "--samples", "1"])
    assert excinfo.value.code == 0
    assert "RESULT overall PASS" in capsys.readouterr().out
