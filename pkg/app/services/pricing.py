# File: app/services/pricing.py
"""
/app/services/pricing.py
Price books, security charges, best-response oracles and the Lagrangian dual value
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Tuple

import numpy as np
from scipy.optimize import linprog

from app.models.market_system import MarketSystem, ModelKind
from app.models.network import state_views
from app.models.prices import PriceBook, Scheme, SecurityCharges, SplitDuals
from app.models.solution import DualSolution, GeneratorSchedule, LoadSchedule, PrimalSolution
from app.utils.errors import ModelMismatch

logger = logging.getLogger(__name__)


# =============================================================================
# Prices
# =============================================================================


def split_duals(dual: DualSolution) -> SplitDuals:
    plus: Dict[Tuple[str, str], float] = {}
    minus: Dict[Tuple[str, str], float] = {}
    for bus in dual.buses:
        for k in dual.contingencies:
            pi = dual.contingency(bus, k)
            plus[(bus, k)] = max(pi, 0.0)
            minus[(bus, k)] = -min(pi, 0.0)
    return SplitDuals(plus=plus, minus=minus)


def _check_kind(dual: DualSolution, model_kind: ModelKind) -> None:
    if model_kind is ModelKind.SINGLE_BUS and (len(dual.buses) != 1 or dual.lines):
        raise ModelMismatch("Single-bus prices need a dual with one bus and no lines")


def price_baseline(dual: DualSolution, model_kind: ModelKind) -> PriceBook:
    """Energy price pi_0 + sum_k pi_k and a single security price sum_k pi_k per bus"""
    _check_kind(dual, model_kind)
    energy, security = {}, {}
    for bus in dual.buses:
        total_k = sum(dual.contingency(bus, k) for k in dual.contingencies)
        energy[bus] = dual.energy(bus) + total_k
        security[bus] = total_k
    return PriceBook(scheme=Scheme.BASELINE, energy=energy, security=security)


def transmission_breakdown(dual: DualSolution) -> Dict[str, Dict[str, Optional[float]]]:
    """|pi_f| per line and state; None where the line is out of service"""
    breakdown: Dict[str, Dict[str, Optional[float]]] = {}
    for line in dual.lines:
        per_state: Dict[str, Optional[float]] = {}
        for state in dual.states:
            pi_f = dual.flow(line, state)
            per_state[state] = None if pi_f is None else abs(pi_f)
        breakdown[line] = per_state
    return breakdown


def price_proposed(dual: DualSolution, model_kind: ModelKind) -> PriceBook:
    """
    Separate up and down reserve prices from the split contingency duals
    and, on a network, one transmission price per line.
    """
    _check_kind(dual, model_kind)
    split = split_duals(dual)
    energy, up, down = {}, {}, {}
    for bus in dual.buses:
        up[bus] = sum(split.up(bus, k) for k in dual.contingencies)
        down[bus] = sum(split.down(bus, k) for k in dual.contingencies)
        energy[bus] = dual.energy(bus) + up[bus] - down[bus]

    transmission: Dict[str, float] = {}
    by_state: Dict[str, Dict[str, Optional[float]]] = {}
    if model_kind is ModelKind.NETWORK:
        by_state = transmission_breakdown(dual)
        transmission = {
            line: sum(v for v in states.values() if v is not None)
            for line, states in by_state.items()
        }
    return PriceBook(
        scheme=Scheme.PROPOSED,
        energy=energy,
        up=up,
        down=down,
        transmission=transmission,
        transmission_by_state=by_state,
    )


def security_charges(
    dual: DualSolution, primal: PrimalSolution, system: MarketSystem
) -> SecurityCharges:
    """
    Charge each generator, for every contingency in which it is out of
    service, the value of the energy and reserves it would have sold there.
    """
    charges: Dict[str, float] = {}
    breakdown: Dict[str, Dict[str, float]] = {}
    for gen in system.generators:
        schedule = primal.generator_schedule(gen.id)
        r_dn = schedule.r_dn or 0.0
        parts: Dict[str, float] = {}
        for k in system.off_contingencies(gen.id):
            pi = dual.contingency(gen.bus, k)
            parts[k] = pi * schedule.g0 + max(pi, 0.0) * schedule.r_up - min(pi, 0.0) * r_dn
        breakdown[gen.id] = parts
        charges[gen.id] = sum(parts.values())
    logger.debug(f"Security charges: {charges}")
    return SecurityCharges(charges=charges, breakdown=breakdown)


# =============================================================================
# Best responses
# =============================================================================


def best_response_gen(
    price: float, schedule: GeneratorSchedule, available: float = 1.0
) -> Tuple[float, float]:
    """
    Contingency output maximising price * g_k within the committed range.

    Args:
        price: Contingency balance dual at the generator's bus
        schedule: Committed g0 and reserves; r_dn=None means there is no
            lower link and the output may drop to zero
        available: 1 if the generator survives the contingency, else 0

    Returns:
        (g_k, revenue) with revenue = pi a g0 + pi_plus a r_up + pi_minus a r_dn
    """
    a = available
    if schedule.r_dn is None:
        if price > 0:
            g = a * (schedule.g0 + schedule.r_up)
            return g, price * g
        if price < 0:
            return 0.0, 0.0
        return a * schedule.g0, 0.0

    if price > 0:
        g = a * (schedule.g0 + schedule.r_up)
    elif price < 0:
        g = a * (schedule.g0 - schedule.r_dn)
    else:
        g = a * schedule.g0
    revenue = (
        price * a * schedule.g0
        + max(price, 0.0) * a * schedule.r_up
        - min(price, 0.0) * a * schedule.r_dn
    )
    return g, revenue


def best_response_load(price: float, schedule: LoadSchedule) -> Tuple[float, float]:
    """(d_k, payment) minimising price * d_k over [d0 - r_up, d0 + r_dn]"""
    if price > 0:
        d = schedule.d0 - schedule.r_up
    elif price < 0:
        d = schedule.d0 + schedule.r_dn
    else:
        d = schedule.d0
    payment = (
        price * schedule.d0
        - max(price, 0.0) * schedule.r_up
        + min(price, 0.0) * schedule.r_dn
    )
    return d, payment


# =============================================================================
# Lagrangian dual value
# =============================================================================


@dataclass(frozen=True)
class LdBreakdown:
    demand_term: float
    transmission_term: float
    angle_term: float
    generator_terms: Mapping[str, float] = field(default_factory=dict)
    load_terms: Mapping[str, float] = field(default_factory=dict)

    @property
    def value(self) -> float:
        return (
            self.demand_term
            + self.transmission_term
            - sum(self.generator_terms.values())
            - sum(self.load_terms.values())
            - self.angle_term
        )


def _maximise(coefs, a_ub, b_ub) -> float:
    """max coefs . x subject to a_ub x <= b_ub, x >= 0"""
    res = linprog(-np.asarray(coefs, dtype=float), A_ub=a_ub, b_ub=b_ub, method="highs")
    if res.status != 0:
        raise ModelMismatch(f"Agent subproblem could not be solved: {res.message}")
    return -float(res.fun)


def _generator_coefficients(
    dual: DualSolution, system: MarketSystem, gen, single_bus: bool
) -> Tuple[float, ...]:
    """Per-unit profit of g0, r_up and r_dn built from the best-response closed forms"""
    pi0 = dual.energy(gen.bus)
    coef_g0 = pi0 - gen.energy_offer
    coef_up = -gen.up_offer
    coef_dn = -gen.dn_offer
    for k in system.contingencies:
        a = 0.0 if gen.id in k.outaged_generators else 1.0
        pi = dual.contingency(gen.bus, k.id)
        r_dn_unit = None if single_bus else 0.0
        coef_g0 += best_response_gen(pi, GeneratorSchedule(1.0, 0.0, r_dn_unit), a)[1]
        coef_up += best_response_gen(pi, GeneratorSchedule(0.0, 1.0, r_dn_unit), a)[1]
        if not single_bus:
            coef_dn += best_response_gen(pi, GeneratorSchedule(0.0, 0.0, 1.0), a)[1]
    return coef_g0, coef_up, coef_dn


def ld_breakdown(
    dual: DualSolution,
    system: MarketSystem,
    model_kind: Optional[ModelKind] = None,
    tol: float = 1e-6,
) -> LdBreakdown:
    """
    Decomposed Lagrangian dual function: balance and flow rows are priced,
    every agent best-responds over its own feasible set.
    """
    kind = model_kind or system.model_kind
    single_bus = kind is ModelKind.SINGLE_BUS

    gen_terms: Dict[str, float] = {}
    for gen in system.generators:
        coef_g0, coef_up, coef_dn = _generator_coefficients(dual, system, gen, single_bus)
        if single_bus:
            # g0 + r <= G, r <= R
            gen_terms[gen.id] = _maximise(
                [coef_g0, coef_up],
                [[1.0, 1.0], [0.0, 1.0]],
                [gen.g_max, gen.r_up_max],
            )
        else:
            # g0 + r_up <= G, r_dn <= g0, r_up <= R_up, r_dn <= R_dn
            gen_terms[gen.id] = _maximise(
                [coef_g0, coef_up, coef_dn],
                [[1.0, 1.0, 0.0], [-1.0, 0.0, 1.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
                [gen.g_max, 0.0, gen.r_up_max, gen.r_dn_max],
            )

    if single_bus:
        bus = system.buses[0].id
        demand = system.total_fixed_demand
        demand_term = (
            dual.energy(bus) + sum(dual.contingency(bus, k.id) for k in system.contingencies)
        ) * demand
        return LdBreakdown(
            demand_term=demand_term,
            transmission_term=0.0,
            angle_term=0.0,
            generator_terms=gen_terms,
        )

    load_terms: Dict[str, float] = {}
    for load in system.loads:
        coef_d0 = load.utility - dual.energy(load.bus)
        coef_up = -load.up_offer
        coef_dn = -load.dn_offer
        for k in system.contingencies:
            pi = dual.contingency(load.bus, k.id)
            coef_d0 -= best_response_load(pi, LoadSchedule(1.0, 0.0, 0.0))[1]
            coef_up -= best_response_load(pi, LoadSchedule(0.0, 1.0, 0.0))[1]
            coef_dn -= best_response_load(pi, LoadSchedule(0.0, 0.0, 1.0))[1]
        # r_up <= d0, d0 + r_dn <= D, r_up <= R_up, r_dn <= R_dn
        load_terms[load.id] = _maximise(
            [coef_d0, coef_up, coef_dn],
            [[-1.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            [0.0, load.d_max, load.r_up_max, load.r_dn_max],
        )

    transmission_term = 0.0
    capacity = {line.id: line.capacity for line in system.lines}
    for line_id in capacity:
        for state in dual.states:
            plus = dual.flow_plus(line_id, state) or 0.0
            minus = dual.flow_minus(line_id, state) or 0.0
            transmission_term -= (plus - minus) * capacity[line_id]

    # Angles are free: their term is 0 when every angle coefficient vanishes
    angle_term = 0.0
    for view in state_views(system):
        pi = np.array([dual.balance(b, view.state) for b in system.bus_ids])
        pi_f = np.array(
            [dual.flow(line.id, view.state) or 0.0 for line in system.lines]
        )
        coefficient = system.base_mva * (view.incidence.T @ pi - pi_f) @ view.branch_flow
        scale = 1.0 + system.base_mva * (float(np.max(np.abs(pi), initial=0.0)))
        if np.max(np.abs(coefficient), initial=0.0) > tol * scale:
            angle_term = math.inf
            logger.debug(f"Angle coefficients do not vanish in state {view.state}")
            break

    return LdBreakdown(
        demand_term=0.0,
        transmission_term=transmission_term,
        angle_term=angle_term,
        generator_terms=gen_terms,
        load_terms=load_terms,
    )


def ld_value(
    dual: DualSolution, system: MarketSystem, model_kind: Optional[ModelKind] = None
) -> float:
    """Lagrangian dual function; equals the primal optimum at an optimal dual"""
    return ld_breakdown(dual, system, model_kind).value
