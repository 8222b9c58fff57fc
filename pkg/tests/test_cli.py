# File: tests/test_cli.py
"""
/tests/test_cli.py
Command-line verbs and exit codes
"""

import pytest
import simplejson as json
from click.testing import CliRunner

from app.routes import cli

from tests.conftest import SINGLE_BUS_PATH, TWO_BUS_PATH


@pytest.fixture
def runner():
    return CliRunner(mix_stderr=False)


@pytest.fixture
def infeasible_path(tmp_path):
    document = {
        "buses": [{"id": "B1", "is_reference": True}],
        "generators": [
            {"id": "G1", "bus": "B1", "g_max": 20, "r_up_max": 10, "energy_offer": 1},
            {"id": "G2", "bus": "B1", "g_max": 20, "r_up_max": 10, "energy_offer": 2},
        ],
        "loads": [{"id": "D1", "bus": "B1", "fixed_demand": 50}],
        "contingencies": [{"id": "K1", "generators": ["G1"]}],
    }
    path = tmp_path / "infeasible.json"
    path.write_text(json.dumps(document))
    return str(path)


def test_validate(runner, app):
    result = runner.invoke(cli, ["validate", "--system", TWO_BUS_PATH], obj=app)
    assert result.exit_code == 0, result.stderr
    assert "OK (network, 2 buses, 3 generators, 2 loads, 1 lines, 4 contingencies)" in result.stdout
    assert "sha256=" in result.stdout


def test_validate_missing_file(runner, app, tmp_path):
    result = runner.invoke(cli, ["validate", "--system", str(tmp_path / "nope.json")], obj=app)
    assert result.exit_code == 2
    assert "ParseError" in result.stderr


def test_run_passes(runner, app):
    result = runner.invoke(cli, ["run", "--system", TWO_BUS_PATH], obj=app)
    assert result.exit_code == 0, result.stderr
    assert "Proposed generator settlement ($)" in result.stdout
    assert "Overall: PASS" in result.stdout


def test_run_infeasible_instance(runner, app, infeasible_path):
    result = runner.invoke(cli, ["run", "--system", infeasible_path], obj=app)
    assert result.exit_code == 3
    assert "Infeasible" in result.stderr


def test_failing_verdict_exits_with_four(runner, app):
    # a negative money tolerance makes every zero-profit generator an offender
    result = runner.invoke(
        cli, ["verify", "--system", SINGLE_BUS_PATH, "--tol-money", "-1"], obj=app
    )
    assert result.exit_code == 4
    assert "Overall: FAIL" in result.stdout
    assert "VerdictFailure" in result.stderr


def test_prices_proposed_only(runner, app):
    result = runner.invoke(
        cli, ["prices", "--system", TWO_BUS_PATH, "--scheme", "proposed"], obj=app
    )
    assert result.exit_code == 0, result.stderr
    assert "Proposed prices ($/MWh)" in result.stdout
    assert "Baseline prices" not in result.stdout


def test_settle_csv(runner, app):
    result = runner.invoke(
        cli, ["settle", "--system", SINGLE_BUS_PATH, "--format", "csv"], obj=app
    )
    assert result.exit_code == 0, result.stderr
    lines = result.stdout.splitlines()
    assert lines[0] == "section,scheme,entity,field,value"
    assert {line.split(",")[0] for line in lines[1:]} == {"charges", "settlement"}


def test_compare_forces_both_schemes(runner, app):
    result = runner.invoke(
        cli, ["compare", "--system", SINGLE_BUS_PATH, "--scheme", "baseline"], obj=app
    )
    assert result.exit_code == 0, result.stderr
    assert "Charges cover missing money: yes" in result.stdout


def test_batch_json_is_a_list(runner, app, tmp_path):
    out = tmp_path / "report.json"
    result = runner.invoke(
        cli,
        [
            "verify",
            "--system",
            SINGLE_BUS_PATH,
            "--system",
            TWO_BUS_PATH,
            "--format",
            "json",
            "--jobs",
            "2",
            "--out",
            str(out),
        ],
        obj=app,
    )
    assert result.exit_code == 0, result.stderr
    assert result.stdout == ""
    data = json.loads(out.read_text())
    assert [d["system_path"] for d in data] == [SINGLE_BUS_PATH, TWO_BUS_PATH]
    assert all(d["passed"] for d in data)


def test_batch_export_lp_numbers_files(runner, app, tmp_path):
    target = tmp_path / "model.lp"
    result = runner.invoke(
        cli,
        [
            "prices",
            "--system",
            SINGLE_BUS_PATH,
            "--system",
            TWO_BUS_PATH,
            "--export-lp",
            str(target),
        ],
        obj=app,
    )
    assert result.exit_code == 0, result.stderr
    assert (tmp_path / "model.1.lp").exists()
    assert (tmp_path / "model.2.lp").exists()


def test_unknown_format_is_a_usage_error(runner, app):
    result = runner.invoke(
        cli, ["run", "--system", TWO_BUS_PATH, "--format", "xml"], obj=app
    )
    assert result.exit_code == 2
