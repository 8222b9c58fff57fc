# File: tests/test_formulation.py
"""
/tests/test_formulation.py
Tests for the single-bus and network LP builders
"""

from dataclasses import replace

import pytest

from app.models.lp_instance import ConstraintTag, Sense, TagKind, VarRole
from app.models.market_system import Bus, Generator, Load, MarketSystem, ModelKind
from app.services.formulation import build_lp, direct_objective, expected_counts
from app.services.lpsolve import solve
from app.utils.errors import ModelMismatch


def test_single_bus_sizes(single_bus):
    lp = build_lp(single_bus)
    counts = expected_counts(single_bus)
    assert (lp.n_variables, lp.n_equalities, lp.n_inequalities) == (15, 4, 15)
    assert (counts.variables, counts.equalities, counts.inequalities) == (15, 4, 15)


def test_two_bus_sizes(two_bus):
    lp = build_lp(two_bus)
    counts = expected_counts(two_bus)
    assert lp.n_variables == counts.variables == 3 * 7 + 2 * 7 + 2 * 5
    # 10 balances, 4 intact-state references plus 2 in the islanded state
    assert lp.n_equalities == counts.equalities == 16
    assert lp.n_inequalities == counts.inequalities == 2 * 4 + 3 * 12 + 2 * 12


def test_single_bus_balance_rows(single_bus):
    lp = build_lp(single_bus)
    pre = lp.row(ConstraintTag(TagKind.PRE_BALANCE, "B1"))
    assert pre.sense is Sense.EQ
    assert pre.rhs == 120.0
    assert len(pre.coefficients) == 3
    assert lp.has_row(ConstraintTag(TagKind.POST_BALANCE, "B1", "K3"))


def test_outaged_generator_link_has_no_schedule_terms(single_bus):
    lp = build_lp(single_bus)
    link = lp.row(ConstraintTag(TagKind.GEN_UP_LINK, "G1", "K1"))
    assert link.coefficients == ((lp.index(VarRole.G_K, "G1", "K1"), 1.0),)


def test_outaged_line_has_no_flow_rows(two_bus):
    lp = build_lp(two_bus)
    assert lp.has_row(ConstraintTag(TagKind.FLOW_UPPER, "L12", "K1"))
    assert not lp.has_row(ConstraintTag(TagKind.FLOW_UPPER, "L12", "K4"))
    assert not lp.has_row(ConstraintTag(TagKind.FLOW_LOWER, "L12", "K4"))
    assert lp.has_row(ConstraintTag(TagKind.REF_ANGLE, "B2", "K4"))
    assert not lp.has_row(ConstraintTag(TagKind.REF_ANGLE, "B2", "K1"))


def test_flow_rows_scale_by_base(two_bus):
    lp = build_lp(two_bus)
    upper = lp.row(ConstraintTag(TagKind.FLOW_UPPER, "L12", "0"))
    theta_1 = lp.index(VarRole.THETA, "B1", "0")
    theta_2 = lp.index(VarRole.THETA, "B2", "0")
    assert dict(upper.coefficients) == {theta_1: 100.0, theta_2: -100.0}
    assert upper.rhs == 70.0


def test_angles_are_free(two_bus):
    lp = build_lp(two_bus)
    for var in lp.variables:
        assert var.is_free == (var.role is VarRole.THETA)


def test_objective_prices_utility_negatively(two_bus):
    lp = build_lp(two_bus)
    d0 = lp.variables[lp.index(VarRole.D0, "D1")]
    assert d0.cost == -200.0


def test_forced_single_bus_on_network_data_is_rejected(two_bus):
    with pytest.raises(ModelMismatch):
        build_lp(two_bus, ModelKind.SINGLE_BUS)


def test_network_on_fixed_demand_is_rejected(single_bus):
    with pytest.raises(ModelMismatch):
        build_lp(single_bus, ModelKind.NETWORK)


def test_several_buses_without_lines_is_rejected():
    system = MarketSystem(
        buses=(Bus("B1"), Bus("B2")),
        generators=(Generator("G1", "B1", g_max=10, r_up_max=1, energy_offer=1),),
        loads=(Load("D1", "B2", d_max=5, utility=10),),
    )
    with pytest.raises(ModelMismatch):
        build_lp(system)


def test_direct_objective_matches_lp(two_bus_solved, single_bus_solved, two_bus, single_bus):
    for system, (lp, primal, _, _) in ((two_bus, two_bus_solved), (single_bus, single_bus_solved)):
        assert direct_objective(system, primal) == pytest.approx(
            lp.evaluate_objective(primal.values), abs=1e-9
        )


def test_zero_demand_without_contingencies_costs_nothing(single_bus):
    system = replace(
        single_bus,
        loads=(Load("D1", "B1", fixed_demand=0.0),),
        contingencies=(),
    )
    lp = build_lp(system)
    assert lp.model_kind is ModelKind.SINGLE_BUS
    primal, _, _ = solve(lp)
    assert primal.objective == pytest.approx(0.0, abs=1e-9)


def test_network_without_reserves_is_an_energy_auction(two_bus):
    system = replace(
        two_bus,
        generators=tuple(replace(g, r_up_max=0.0, r_dn_max=0.0) for g in two_bus.generators),
        loads=tuple(replace(d, r_up_max=0.0, r_dn_max=0.0) for d in two_bus.loads),
        contingencies=(),
    )
    primal, _, _ = solve(build_lp(system))
    energy_cost = sum(
        g.energy_offer * primal.generator_schedule(g.id).g0 for g in system.generators
    )
    utility = sum(d.utility * primal.load_schedule(d.id).d0 for d in system.loads)
    assert primal.objective == pytest.approx(energy_cost - utility, abs=1e-6)
    # G1 serves D1 and exports 10 over L12, G2 covers the rest of D2
    assert primal.objective == pytest.approx(100 * 20 + 30 * 50 - 90 * 200 - 40 * 150, abs=1e-6)
    for g in system.generators:
        assert primal.generator_schedule(g.id).r_up == pytest.approx(0.0, abs=1e-9)
