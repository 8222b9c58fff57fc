# File: tests/test_reporting.py
"""
/tests/test_reporting.py
Tests for table, JSON and CSV rendering
"""

import csv
import io

import pytest
import simplejson as json

from app import create_app
from app.models.archive import RunArchive
from app.models.market_system import ModelKind
from app.services.pricing import price_baseline, price_proposed, security_charges
from app.services.reporting import SECTIONS, emit_report, render_prices, render_settlement
from app.services.scenario import run_scenario
from app.services.settlement import settle
from app.utils.errors import ConfigError
from app.utils.formatting import format_money, format_price, format_ratio

from tests.conftest import SINGLE_BUS_PATH, TWO_BUS_PATH, TestConfig, read_golden


@pytest.fixture(scope="module")
def two_bus_archive():
    app = create_app(TestConfig)
    return run_scenario(app.scenario_config(TWO_BUS_PATH))


# =============================================================================
# Formatting
# =============================================================================


@pytest.mark.parametrize(
    "value, expected",
    [(200.0, "200"), (12.5, "12.5"), (-5.0, "-5"), (1e-7, "0"), (-0.0, "0"), (None, "-")],
)
def test_format_price(value, expected):
    assert format_price(value) == expected


def test_format_money():
    assert format_money(13500.0000001) == "13,500"
    assert format_money(-5200.0) == "-5,200"
    assert format_money(-0.2) == "0"
    assert format_money(1234567.0, separators=False) == "1234567"


def test_format_ratio():
    assert format_ratio(0.4459) == "44.6%"
    assert format_ratio(None) == "-"


# =============================================================================
# Golden tables
# =============================================================================


def test_two_bus_proposed_price_table(two_bus_published_dual):
    book = price_proposed(two_bus_published_dual, ModelKind.NETWORK)
    assert render_prices(book, ModelKind.NETWORK) + "\n" == read_golden(
        "two_bus_proposed_prices.txt"
    )


def test_two_bus_proposed_settlement_table(two_bus, two_bus_solved, two_bus_published_dual):
    _, primal, _, _ = two_bus_solved
    book = price_proposed(two_bus_published_dual, ModelKind.NETWORK)
    charges = security_charges(two_bus_published_dual, primal, two_bus)
    report = settle(primal, book, charges, two_bus)
    assert render_settlement(report) + "\n" == read_golden("two_bus_proposed_settlement.txt")


def test_single_bus_baseline_tables(single_bus, single_bus_solved, single_bus_published_dual):
    _, primal, _, _ = single_bus_solved
    book = price_baseline(single_bus_published_dual, ModelKind.SINGLE_BUS)
    report = settle(primal, book, None, single_bus)
    assert render_prices(book, ModelKind.SINGLE_BUS) + "\n" == read_golden(
        "single_bus_baseline_prices.txt"
    )
    assert render_settlement(report) + "\n" == read_golden("single_bus_baseline_settlement.txt")


# =============================================================================
# Report modes
# =============================================================================


def test_table_report_sections(two_bus_archive):
    text = emit_report(two_bus_archive, "table")
    assert text.startswith(f"System: {TWO_BUS_PATH}\n")
    assert "Security charges ($)" in text
    assert "Proposed minus baseline ($)" in text
    assert "Baseline profit inflation: " in text
    assert "Overall: PASS" in text
    assert text.endswith("\n")


def test_table_report_subset(two_bus_archive):
    text = emit_report(two_bus_archive, "table", sections=("prices",))
    assert text.startswith("Baseline prices ($/MWh)")
    assert "Verdicts" not in text


def test_json_report_is_canonical(two_bus_archive):
    text = emit_report(two_bus_archive, "json")
    data = json.loads(text)
    assert data["passed"] is True
    assert data["objective"] == pytest.approx(-15475.0, abs=1e-4)
    assert json.dumps(data, sort_keys=True, indent=2) + "\n" == text


def test_json_report_parses_back_to_the_same_run(two_bus_archive):
    text = emit_report(two_bus_archive, "json")
    restored = RunArchive.from_dict(json.loads(text))
    assert restored.reports == two_bus_archive.reports
    assert restored.price_books == two_bus_archive.price_books
    assert restored.verdicts == two_bus_archive.verdicts
    assert emit_report(restored, "json") == text


def test_json_report_subset(two_bus_archive):
    data = json.loads(emit_report(two_bus_archive, "json", sections=("verdicts",)))
    assert set(data) == {"verdicts", "passed"}
    names = [v["name"] for v in data["verdicts"]]
    assert "proposed_revenue_neutrality" in names


def test_csv_report(two_bus_archive):
    rows = list(csv.reader(io.StringIO(emit_report(two_bus_archive, "csv"))))
    assert rows[0] == ["section", "scheme", "entity", "field", "value"]
    charge = next(r for r in rows if r[0] == "charges" and r[2] == "G1")
    assert float(charge[4]) == two_bus_archive.charges.charge("G1")
    sections = {r[0] for r in rows[1:]}
    assert sections == set(SECTIONS)


def test_reports_are_deterministic():
    app = create_app(TestConfig)
    config = app.scenario_config(SINGLE_BUS_PATH)
    for fmt in ("table", "json", "csv"):
        assert emit_report(run_scenario(config), fmt) == emit_report(run_scenario(config), fmt)


def test_unknown_format(two_bus_archive):
    with pytest.raises(ConfigError):
        emit_report(two_bus_archive, "xml")
