"""Command-line surface: subcommands, flags, exit codes, output files."""

import json
import os

import pytest
from click.testing import CliRunner

from relaysec.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def test_help_lists_subcommands(runner):
    result = runner.invoke(main, ["--help"])
    assert result.exit_code == 0
    for name in ("sweep-ratio", "sweep-snr", "sweep-relays", "validate"):
        assert name in result.output


def test_sweep_ratio_writes_csv(runner, tmp_path):
    out = tmp_path / "ratio.csv"
    config = tmp_path / "c.json"
    config.write_text(json.dumps({"sweep": {"axis": "ratio", "values": [0.5, 1.0, 2.0]}}))
    result = runner.invoke(
        main,
        ["sweep-ratio", "--config", str(config), "--slots", "1000", "--seed", "3",
         "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    text = out.read_text()
    assert text.splitlines()[0].startswith("#")
    assert "ifd-mrrs" in text


def test_scheme_flag_restricts(runner, tmp_path):
    out = tmp_path / "one.csv"
    config = tmp_path / "c.json"
    config.write_text(json.dumps({"sweep": {"axis": "ratio", "values": [1.0]}}))
    result = runner.invoke(
        main,
        ["sweep-ratio", "--config", str(config), "--slots", "500", "--out", str(out),
         "--scheme", "max-min-ratio"],
    )
    assert result.exit_code == 0, result.output
    body = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert len(body) == 2  # header row plus one data row
    assert body[1].startswith("max-min-ratio,")


def test_empty_scheme_list_fails_without_output(runner, tmp_path):
    config = tmp_path / "c.json"
    config.write_text(json.dumps({"schemes": []}))
    out = tmp_path / "never.csv"
    result = runner.invoke(main, ["sweep-ratio", "--config", str(config), "--out", str(out)])
    assert result.exit_code != 0
    assert "scheme list" in result.output
    assert not out.exists()


def test_validate_exit_zero_and_report(runner, tmp_path):
    out = tmp_path / "report.json"
    result = runner.invoke(
        main, ["validate", "--slots", "60000", "--seed", "12", "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    assert "PASS p_s" in result.output
    report = json.loads(out.read_text())
    assert report["all_pass"] is True


def test_sweep_snr_small(runner, tmp_path):
    out = tmp_path / "snr.csv"
    config = tmp_path / "c.json"
    config.write_text(
        json.dumps({"schemes": ["max-min-ratio"], "sweep": {"axis": "snr", "values_db": [10.0]},
                    "evaluator": "mc"})
    )
    result = runner.invoke(
        main, ["sweep-snr", "--config", str(config), "--slots", "800", "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    assert out.exists()


def test_sweep_relays_small(runner, tmp_path):
    out = tmp_path / "relays.csv"
    config = tmp_path / "c.json"
    config.write_text(
        json.dumps({"schemes": ["max-link-ratio"], "evaluator": "mc",
                    "sweep": {"axis": "relays", "values": [2]}})
    )
    result = runner.invoke(
        main, ["sweep-relays", "--config", str(config), "--slots", "800", "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    assert out.exists()


def test_axis_mismatch_is_clean_error(runner, tmp_path):
    config = tmp_path / "c.json"
    config.write_text(json.dumps({"sweep": {"axis": "snr", "values_db": [0.0]}}))
    result = runner.invoke(main, ["sweep-ratio", "--config", str(config)])
    assert result.exit_code != 0
    assert "sweeps" in result.output
