# File: tests/test_market_system.py
"""
/tests/test_market_system.py
Tests for the market instance types
"""

from app.models.market_system import (
    PRE_CONTINGENCY,
    Bus,
    Contingency,
    Generator,
    Line,
    Load,
    MarketSystem,
    ModelKind,
)


def test_single_bus_example_shape(single_bus):
    assert single_bus.model_kind is ModelKind.SINGLE_BUS
    assert single_bus.bus_ids == ("B1",)
    assert single_bus.total_fixed_demand == 120.0
    assert single_bus.states == (PRE_CONTINGENCY, "K1", "K2", "K3")


def test_two_bus_example_shape(two_bus):
    assert two_bus.model_kind is ModelKind.NETWORK
    assert two_bus.reference_bus == "B1"
    assert two_bus.line("L12").capacity == 70.0
    assert two_bus.generator("G2").bus == "B2"
    assert two_bus.load("D1").utility == 200.0


def test_off_contingencies(two_bus):
    assert two_bus.off_contingencies("G1") == ("K1",)
    assert two_bus.off_contingencies("G3") == ("K3",)


def test_line_outage_is_not_a_generator_outage(two_bus):
    k4 = next(k for k in two_bus.contingencies if k.id == "K4")
    assert k4.outaged_lines == frozenset({"L12"})
    assert not k4.outaged_generators
    assert not k4.is_empty


def test_reference_defaults_to_first_bus():
    system = MarketSystem(
        buses=(Bus("N1"), Bus("N2")),
        generators=(Generator("G", "N1", g_max=10, r_up_max=5, energy_offer=1),),
        lines=(Line("L", "N1", "N2", reactance=0.1, capacity=5),),
    )
    assert system.reference_bus == "N1"


def test_elastic_single_bus_load_is_network_kind():
    system = MarketSystem(
        buses=(Bus("N1"),),
        generators=(Generator("G", "N1", g_max=10, r_up_max=5, energy_offer=1),),
        loads=(Load("D", "N1", d_max=5, utility=30),),
    )
    assert system.model_kind is ModelKind.NETWORK


def test_to_dict_uses_document_field_names():
    k = Contingency("K1", frozenset({"G2", "G1"}), frozenset())
    assert k.to_dict() == {"id": "K1", "generators": ["G1", "G2"], "lines": []}


def test_system_to_dict_lists_every_section(two_bus):
    data = two_bus.to_dict()
    assert set(data) == {
        "buses",
        "generators",
        "loads",
        "lines",
        "contingencies",
        "base_mva",
        "period_hours",
    }
    assert data["buses"][0] == {"id": "B1", "is_reference": True}
