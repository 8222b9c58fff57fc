# File: tests/test_scenario.py
"""
/tests/test_scenario.py
End-to-end scenario runs, batches and LP export
"""

import pytest

from app.models.archive import RunArchive, ScenarioConfig, parse_schemes
from app.models.market_system import ModelKind
from app.models.prices import Scheme
from app.services.formulation import build_lp
from app.services.lp_export import build_pyomo_model, write_lp
from app.services.scenario import LAGRANGIAN, run_batch, run_scenario
from app.utils.errors import ConfigError, ModelMismatch

from tests.conftest import SINGLE_BUS_PATH, TWO_BUS_PATH


def test_two_bus_run(app):
    archive = run_scenario(app.scenario_config(TWO_BUS_PATH))
    assert archive.model_kind is ModelKind.NETWORK
    assert archive.objective == pytest.approx(-15475.0, abs=1e-4)
    assert archive.schemes == (Scheme.BASELINE, Scheme.PROPOSED)
    assert archive.passed
    assert archive.verdict(LAGRANGIAN).passed
    assert archive.verdict("proposed_revenue_adequacy").passed
    assert archive.verdict("proposed_revenue_neutrality").passed
    assert archive.verdict("proposed_social_welfare").passed
    baseline = archive.verdict("baseline_revenue_neutrality")
    assert not baseline.passed
    assert baseline.informational
    assert archive.comparison.missing_money > 0


def test_single_bus_run(app):
    archive = run_scenario(app.scenario_config(SINGLE_BUS_PATH))
    assert archive.model_kind is ModelKind.SINGLE_BUS
    assert archive.optimality.passed
    assert archive.charges.charge("G1") == pytest.approx(5200.0, abs=1e-4)
    assert archive.comparison.identity_holds is True


def test_single_scheme_run_has_no_comparison(app):
    archive = run_scenario(app.scenario_config(SINGLE_BUS_PATH, scheme="baseline"))
    assert archive.schemes == (Scheme.BASELINE,)
    assert archive.charges is None
    assert archive.comparison is None
    # baseline verdicts never fail a run
    assert archive.passed


def test_runs_are_deterministic(app):
    config = app.scenario_config(TWO_BUS_PATH)
    assert run_scenario(config).to_dict() == run_scenario(config).to_dict()


def test_archive_survives_dict_round_trip(app):
    archive = run_scenario(app.scenario_config(TWO_BUS_PATH))
    restored = RunArchive.from_dict(archive.to_dict())
    assert restored.to_dict() == archive.to_dict()


def test_timestamps_follow_source_date_epoch(app, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
    config = ScenarioConfig(system_path=SINGLE_BUS_PATH, record_timestamps=True)
    archive = run_scenario(config)
    assert archive.timestamps == {
        "started": "1970-01-01T00:00:00+00:00",
        "finished": "1970-01-01T00:00:00+00:00",
    }


def test_batch_keeps_input_order(app):
    configs = [app.scenario_config(p) for p in (TWO_BUS_PATH, SINGLE_BUS_PATH, TWO_BUS_PATH)]
    archives = run_batch(configs, jobs=3)
    assert [a.system_path for a in archives] == [TWO_BUS_PATH, SINGLE_BUS_PATH, TWO_BUS_PATH]
    assert archives[0].to_dict() == archives[2].to_dict()


def test_forced_model_kind_is_checked(app):
    with pytest.raises(ModelMismatch):
        run_scenario(app.scenario_config(TWO_BUS_PATH, model_kind="single-bus"))


def test_missing_system_file(app, tmp_path):
    with pytest.raises(ConfigError):
        app.scenario_config(str(tmp_path / "absent.json"))


def test_unknown_scheme():
    with pytest.raises(ConfigError):
        parse_schemes("nodal")


def test_tolerance_overrides(app):
    config = app.scenario_config(SINGLE_BUS_PATH, tol_gap=1e-3)
    assert config.tolerances.gap == 1e-3
    assert config.tolerances.money == app.tolerances.money


# =============================================================================
# LP export
# =============================================================================


def test_pyomo_model_mirrors_instance(two_bus):
    lp = build_lp(two_bus)
    model = build_pyomo_model(lp)
    assert len(model.g0) == 3
    assert len(model.theta) == 2 * 5
    assert model.g0["G1"].bounds == (0.0, None)
    assert ("L12", "K4") not in model.FlowUpper_index


def test_exported_lp_uses_symbolic_names(tmp_path, single_bus):
    path = write_lp(build_lp(single_bus), str(tmp_path / "single_bus.lp"))
    text = open(path, encoding="utf-8").read()
    assert "g0(G1)" in text
    assert "PreBalance(B1)" in text
    assert "PostBalance(B1_K3)" in text


def test_scenario_exports_lp(app, tmp_path):
    target = tmp_path / "two_bus.lp"
    run_scenario(app.scenario_config(TWO_BUS_PATH, export_lp=str(target)))
    assert "theta(B2_K4)" in target.read_text()
