# File: tests/test_settlement.py
"""
/tests/test_settlement.py
Tests for settlement, the adequacy / neutrality verdicts and scheme comparison
"""

from dataclasses import replace

import pytest

from app.models.market_system import ModelKind
from app.models.prices import Scheme
from app.services.pricing import price_baseline, price_proposed, security_charges
from app.services.settlement import (
    ADEQUACY,
    NEUTRALITY,
    compare_schemes,
    settle,
    social_welfare_check,
    verify_adequacy,
    verify_neutrality,
)
from app.utils.errors import NumericalFailure, SchemeMismatch


@pytest.fixture(scope="module")
def single_bus_reports(single_bus, single_bus_solved, single_bus_published_dual):
    _, primal, _, _ = single_bus_solved
    dual = single_bus_published_dual
    baseline = settle(primal, price_baseline(dual, ModelKind.SINGLE_BUS), None, single_bus)
    charges = security_charges(dual, primal, single_bus)
    proposed = settle(primal, price_proposed(dual, ModelKind.SINGLE_BUS), charges, single_bus)
    return baseline, proposed


@pytest.fixture(scope="module")
def two_bus_reports(two_bus, two_bus_solved, two_bus_published_dual):
    _, primal, _, _ = two_bus_solved
    dual = two_bus_published_dual
    baseline = settle(primal, price_baseline(dual, ModelKind.NETWORK), None, two_bus)
    charges = security_charges(dual, primal, two_bus)
    proposed = settle(primal, price_proposed(dual, ModelKind.NETWORK), charges, two_bus)
    return baseline, proposed


# =============================================================================
# Single-bus example
# =============================================================================


def test_single_bus_proposed_settlement(single_bus_reports):
    _, proposed = single_bus_reports
    assert proposed.scheme is Scheme.PROPOSED
    profits = [proposed.generator(g).profit for g in ("G1", "G2", "G3")]
    assert profits == pytest.approx([0.0, 3750.0, 2450.0], abs=1e-4)
    assert proposed.generator("G1").security_charge == pytest.approx(5200.0, abs=1e-4)
    assert proposed.balance.consumer_payment == pytest.approx(12000.0, abs=1e-4)
    assert proposed.balance.generation_revenue == pytest.approx(12000.0, abs=1e-4)
    assert proposed.transmission == ()


def test_single_bus_consumer_is_inelastic(single_bus_reports):
    _, proposed = single_bus_reports
    row = proposed.consumer("D1")
    assert row.inelastic
    assert row.payment == pytest.approx(12000.0, abs=1e-4)
    assert row.profit == pytest.approx(-12000.0, abs=1e-4)


def test_single_bus_baseline_leaves_missing_money(single_bus_reports):
    baseline, _ = single_bus_reports
    assert baseline.balance.generation_revenue == pytest.approx(17200.0, abs=1e-4)
    assert baseline.balance.balance == pytest.approx(-5200.0, abs=1e-4)
    assert all(row.security_charge == 0.0 for row in baseline.generators)


def test_single_bus_verdicts(single_bus_reports):
    baseline, proposed = single_bus_reports
    assert verify_adequacy(proposed).passed
    assert verify_neutrality(proposed).passed
    neutrality = verify_neutrality(baseline)
    assert neutrality.name == NEUTRALITY
    assert not neutrality.passed
    assert neutrality.informational


def test_single_bus_welfare_accounting(single_bus_reports):
    _, proposed = single_bus_reports
    assert social_welfare_check(proposed, 5800.0).passed
    assert not social_welfare_check(proposed, 5000.0).passed


def test_single_bus_charges_cover_missing_money(single_bus_reports):
    baseline, proposed = single_bus_reports
    comparison = compare_schemes(baseline, proposed)
    assert comparison.missing_money == pytest.approx(5200.0, abs=1e-4)
    assert comparison.security_charge_total == pytest.approx(5200.0, abs=1e-4)
    assert comparison.identity_holds is True
    assert comparison.profit_inflation is None
    assert comparison.generator_deltas["G1"]["security_charge"] == pytest.approx(5200.0, abs=1e-4)


# =============================================================================
# Two-bus example
# =============================================================================


def test_two_bus_generator_revenues(two_bus_reports):
    _, proposed = two_bus_reports
    revenues = [proposed.generator(g).total_revenue for g in ("G1", "G2", "G3")]
    assert revenues == pytest.approx([1500.0, 5575.0, 4475.0], abs=1e-4)
    assert proposed.balance.generation_revenue == pytest.approx(11550.0, abs=1e-4)
    profits = [proposed.generator(g).profit for g in ("G1", "G2", "G3")]
    assert profits == pytest.approx([0.0, 3900.0, 2625.0], abs=1e-4)


def test_two_bus_consumers_and_lines(two_bus_reports):
    _, proposed = two_bus_reports
    assert proposed.consumer("D1").payment == pytest.approx(14200.0, abs=1e-4)
    assert proposed.consumer("D2").payment == pytest.approx(4000.0, abs=1e-4)
    assert proposed.consumer("D1").profit == pytest.approx(300.0, abs=1e-4)
    assert proposed.consumer("D2").profit == pytest.approx(2000.0, abs=1e-4)
    (line,) = proposed.transmission
    assert line.line_id == "L12"
    assert line.revenue == pytest.approx(6650.0, abs=1e-4)
    assert proposed.balance.balance == pytest.approx(0.0, abs=1e-4)


def test_two_bus_verdicts(two_bus_reports):
    baseline, proposed = two_bus_reports
    adequacy = verify_adequacy(proposed)
    assert adequacy.name == ADEQUACY
    assert adequacy.passed
    assert verify_neutrality(proposed, ModelKind.NETWORK).passed
    assert social_welfare_check(proposed, -15475.0).passed
    assert baseline.balance.balance == pytest.approx(-6900.0, abs=1e-4)
    assert baseline.balance.transmission_revenue == 0.0


def test_two_bus_baseline_inflates_profits(two_bus_reports):
    baseline, proposed = two_bus_reports
    comparison = compare_schemes(baseline, proposed)
    assert comparison.identity_holds is None
    assert comparison.profit_inflation == pytest.approx(22375.0 / 15475.0 - 1.0, abs=1e-9)
    assert comparison.balance_delta == pytest.approx(6900.0, abs=1e-4)
    g2 = comparison.generator_deltas["G2"]
    assert g2["revenue_up"] == pytest.approx(150.0, abs=1e-4)
    assert g2["revenue_dn"] == pytest.approx(-375.0, abs=1e-4)


def test_identical_reports_have_zero_deltas(two_bus_reports):
    _, proposed = two_bus_reports
    comparison = compare_schemes(proposed, proposed)
    for deltas in list(comparison.generator_deltas.values()) + list(
        comparison.consumer_deltas.values()
    ):
        assert all(value == 0.0 for value in deltas.values())
    assert comparison.balance_delta == 0.0


# =============================================================================
# Failures
# =============================================================================


def test_baseline_rejects_security_charges(
    single_bus, single_bus_solved, single_bus_published_dual
):
    _, primal, _, _ = single_bus_solved
    charges = security_charges(single_bus_published_dual, primal, single_bus)
    book = price_baseline(single_bus_published_dual, ModelKind.SINGLE_BUS)
    with pytest.raises(SchemeMismatch):
        settle(primal, book, charges, single_bus)


def test_proposed_requires_security_charges(
    single_bus, single_bus_solved, single_bus_published_dual
):
    _, primal, _, _ = single_bus_solved
    book = price_proposed(single_bus_published_dual, ModelKind.SINGLE_BUS)
    with pytest.raises(SchemeMismatch):
        settle(primal, book, None, single_bus)


def test_negative_profit_names_the_offender(two_bus_reports):
    _, proposed = two_bus_reports
    verdict = verify_adequacy(proposed, tol=-1e-3)
    assert not verdict.passed
    assert "G1" in verdict.offenders


def test_broken_balance_maps_to_solver_exit_code(two_bus_reports):
    _, proposed = two_bus_reports
    broken = replace(proposed, balance=replace(proposed.balance, balance=123.0))
    with pytest.raises(NumericalFailure) as excinfo:
        broken.assert_identities(tol=1e-6)
    assert excinfo.value.exit_code == 3
    assert "system balance" in str(excinfo.value)
