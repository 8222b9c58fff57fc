# File: app/services/formulation.py
"""
/app/services/formulation.py
Builders for the contingency-constrained energy and reserve LPs
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from app.models.lp_instance import (
    Constraint,
    ConstraintTag,
    LpInstance,
    Sense,
    TagKind,
    Variable,
    VarRole,
)
from app.models.market_system import PRE_CONTINGENCY, MarketSystem, ModelKind
from app.models.network import state_views
from app.models.solution import PrimalSolution
from app.utils.errors import ModelMismatch

logger = logging.getLogger(__name__)


class _LpBuilder:
    def __init__(self):
        self.variables: List[Variable] = []
        self.constraints: List[Constraint] = []
        self._index: Dict[Tuple[VarRole, str, Optional[str]], int] = {}

    def var(
        self,
        role: VarRole,
        owner: str,
        state: Optional[str] = None,
        cost: float = 0.0,
        free: bool = False,
    ) -> int:
        variable = Variable(
            role=role,
            owner=owner,
            state=state,
            lower=None if free else 0.0,
            upper=None,
            cost=float(cost),
        )
        self._index[variable.key] = len(self.variables)
        self.variables.append(variable)
        return self._index[variable.key]

    def idx(self, role: VarRole, owner: str, state: Optional[str] = None) -> int:
        return self._index[(role, owner, state)]

    def row(
        self,
        tag: ConstraintTag,
        sense: Sense,
        terms: List[Tuple[int, float]],
        rhs: float = 0.0,
    ) -> None:
        merged: Dict[int, float] = {}
        for j, coef in terms:
            merged[j] = merged.get(j, 0.0) + float(coef)
        coefficients = tuple((j, c) for j, c in sorted(merged.items()) if c != 0.0)
        self.constraints.append(Constraint(tag, sense, coefficients, float(rhs)))

    def build(self, system: MarketSystem, kind: ModelKind) -> LpInstance:
        return LpInstance(
            model_kind=kind,
            variables=tuple(self.variables),
            constraints=tuple(self.constraints),
            buses=system.bus_ids,
            contingencies=tuple(k.id for k in system.contingencies),
            lines=tuple(line.id for line in system.lines),
        )


def _balance_tag(bus: str, state: str) -> ConstraintTag:
    if state == PRE_CONTINGENCY:
        return ConstraintTag(TagKind.PRE_BALANCE, bus)
    return ConstraintTag(TagKind.POST_BALANCE, bus, state)


# =============================================================================
# Single-bus model
# =============================================================================


def build_single_bus_lp(system: MarketSystem) -> LpInstance:
    """
    Minimise energy cost plus up-reserve cost subject to one balance per
    state and g_k <= a_k (g0 + r) for every generator and contingency.
    """
    if len(system.buses) != 1 or system.lines:
        raise ModelMismatch("Single-bus model needs exactly one bus and no lines")
    if any(load.fixed_demand is None for load in system.loads):
        raise ModelMismatch("Single-bus model needs fixed_demand on every load")
    if any(k.outaged_lines for k in system.contingencies):
        raise ModelMismatch("Single-bus model cannot outage lines")

    bus = system.buses[0].id
    demand = system.total_fixed_demand
    b = _LpBuilder()

    for gen in system.generators:
        b.var(VarRole.G0, gen.id, cost=gen.energy_offer)
        b.var(VarRole.R_UP, gen.id, cost=gen.up_offer)
    for k in system.contingencies:
        for gen in system.generators:
            b.var(VarRole.G_K, gen.id, k.id)

    b.row(
        _balance_tag(bus, PRE_CONTINGENCY),
        Sense.EQ,
        [(b.idx(VarRole.G0, g.id), 1.0) for g in system.generators],
        demand,
    )
    for k in system.contingencies:
        b.row(
            _balance_tag(bus, k.id),
            Sense.EQ,
            [(b.idx(VarRole.G_K, g.id, k.id), 1.0) for g in system.generators],
            demand,
        )

    for k in system.contingencies:
        for gen in system.generators:
            a = 0.0 if gen.id in k.outaged_generators else 1.0
            b.row(
                ConstraintTag(TagKind.GEN_UP_LINK, gen.id, k.id),
                Sense.LE,
                [
                    (b.idx(VarRole.G_K, gen.id, k.id), 1.0),
                    (b.idx(VarRole.G0, gen.id), -a),
                    (b.idx(VarRole.R_UP, gen.id), -a),
                ],
            )

    for gen in system.generators:
        b.row(
            ConstraintTag(TagKind.GEN_CAP_UP, gen.id),
            Sense.LE,
            [(b.idx(VarRole.G0, gen.id), 1.0), (b.idx(VarRole.R_UP, gen.id), 1.0)],
            gen.g_max,
        )
        b.row(
            ConstraintTag(TagKind.GEN_RES_UP_CAP, gen.id),
            Sense.LE,
            [(b.idx(VarRole.R_UP, gen.id), 1.0)],
            gen.r_up_max,
        )

    lp = b.build(system, ModelKind.SINGLE_BUS)
    logger.debug(
        f"Single-bus LP: {lp.n_variables} variables, {lp.n_equalities} equalities, "
        f"{lp.n_inequalities} inequalities"
    )
    return lp


# =============================================================================
# Network model
# =============================================================================


def build_network_lp(system: MarketSystem) -> LpInstance:
    """
    Social-welfare LP over a DC network. Balance rows read
    M^g g - A f - M^d d = 0 with f = base_mva * H theta per state.
    """
    if any(load.fixed_demand is not None for load in system.loads):
        raise ModelMismatch("Network model needs elastic loads (no fixed_demand)")
    if len(system.buses) > 1 and not system.lines:
        raise ModelMismatch("Network model with several buses needs lines")

    views = state_views(system)
    base = system.base_mva
    b = _LpBuilder()

    for gen in system.generators:
        b.var(VarRole.G0, gen.id, cost=gen.energy_offer)
        b.var(VarRole.R_UP, gen.id, cost=gen.up_offer)
        b.var(VarRole.R_DN, gen.id, cost=gen.dn_offer)
    for k in system.contingencies:
        for gen in system.generators:
            b.var(VarRole.G_K, gen.id, k.id)
    for load in system.loads:
        b.var(VarRole.D0, load.id, cost=-load.utility)
        b.var(VarRole.RD_UP, load.id, cost=load.up_offer)
        b.var(VarRole.RD_DN, load.id, cost=load.dn_offer)
    for k in system.contingencies:
        for load in system.loads:
            b.var(VarRole.D_K, load.id, k.id)
    for view in views:
        for bus_id in system.bus_ids:
            b.var(VarRole.THETA, bus_id, view.state, free=True)

    line_ids = tuple(line.id for line in system.lines)
    capacity = {line.id: line.capacity for line in system.lines}

    for view in views:
        s = view.state
        theta = [b.idx(VarRole.THETA, bus_id, s) for bus_id in system.bus_ids]
        flow = base * view.branch_flow
        injection = -(view.incidence @ flow)

        for n, bus_id in enumerate(system.bus_ids):
            terms = []
            for gen in system.generators:
                if gen.bus == bus_id:
                    role, state = (VarRole.G0, None) if s == PRE_CONTINGENCY else (VarRole.G_K, s)
                    terms.append((b.idx(role, gen.id, state), 1.0))
            for load in system.loads:
                if load.bus == bus_id:
                    role, state = (VarRole.D0, None) if s == PRE_CONTINGENCY else (VarRole.D_K, s)
                    terms.append((b.idx(role, load.id, state), -1.0))
            terms.extend(zip(theta, injection[n]))
            b.row(_balance_tag(bus_id, s), Sense.EQ, terms)

        for l, line_id in enumerate(line_ids):
            if line_id not in view.active_lines:
                continue
            b.row(
                ConstraintTag(TagKind.FLOW_UPPER, line_id, s),
                Sense.LE,
                list(zip(theta, flow[l])),
                capacity[line_id],
            )
            b.row(
                ConstraintTag(TagKind.FLOW_LOWER, line_id, s),
                Sense.LE,
                list(zip(theta, -flow[l])),
                capacity[line_id],
            )

        for ref in view.references:
            b.row(
                ConstraintTag(TagKind.REF_ANGLE, ref, s),
                Sense.EQ,
                [(b.idx(VarRole.THETA, ref, s), 1.0)],
            )

    for gen in system.generators:
        g0, r_up, r_dn = (
            b.idx(VarRole.G0, gen.id),
            b.idx(VarRole.R_UP, gen.id),
            b.idx(VarRole.R_DN, gen.id),
        )
        b.row(ConstraintTag(TagKind.GEN_CAP_UP, gen.id), Sense.LE, [(g0, 1), (r_up, 1)], gen.g_max)
        b.row(ConstraintTag(TagKind.GEN_CAP_DN, gen.id), Sense.LE, [(r_dn, 1), (g0, -1)])
        b.row(ConstraintTag(TagKind.GEN_RES_UP_CAP, gen.id), Sense.LE, [(r_up, 1)], gen.r_up_max)
        b.row(ConstraintTag(TagKind.GEN_RES_DN_CAP, gen.id), Sense.LE, [(r_dn, 1)], gen.r_dn_max)
        for k in system.contingencies:
            a = 0.0 if gen.id in k.outaged_generators else 1.0
            g_k = b.idx(VarRole.G_K, gen.id, k.id)
            b.row(
                ConstraintTag(TagKind.GEN_UP_LINK, gen.id, k.id),
                Sense.LE,
                [(g_k, 1.0), (g0, -a), (r_up, -a)],
            )
            b.row(
                ConstraintTag(TagKind.GEN_DN_LINK, gen.id, k.id),
                Sense.LE,
                [(g0, a), (r_dn, -a), (g_k, -1.0)],
            )

    for load in system.loads:
        d0, r_up, r_dn = (
            b.idx(VarRole.D0, load.id),
            b.idx(VarRole.RD_UP, load.id),
            b.idx(VarRole.RD_DN, load.id),
        )
        b.row(ConstraintTag(TagKind.DEM_LOWER, load.id), Sense.LE, [(r_up, 1), (d0, -1)])
        b.row(ConstraintTag(TagKind.DEM_UPPER, load.id), Sense.LE, [(d0, 1), (r_dn, 1)], load.d_max)
        b.row(ConstraintTag(TagKind.DEM_RES_UP_CAP, load.id), Sense.LE, [(r_up, 1)], load.r_up_max)
        b.row(ConstraintTag(TagKind.DEM_RES_DN_CAP, load.id), Sense.LE, [(r_dn, 1)], load.r_dn_max)
        for k in system.contingencies:
            d_k = b.idx(VarRole.D_K, load.id, k.id)
            b.row(
                ConstraintTag(TagKind.DEM_UP_LINK, load.id, k.id),
                Sense.LE,
                [(d0, 1.0), (r_up, -1.0), (d_k, -1.0)],
            )
            b.row(
                ConstraintTag(TagKind.DEM_DN_LINK, load.id, k.id),
                Sense.LE,
                [(d_k, 1.0), (d0, -1.0), (r_dn, -1.0)],
            )

    lp = b.build(system, ModelKind.NETWORK)
    logger.debug(
        f"Network LP: {lp.n_variables} variables, {lp.n_equalities} equalities, "
        f"{lp.n_inequalities} inequalities over {len(views)} states"
    )
    return lp


def build_lp(system: MarketSystem, model_kind: Optional[ModelKind] = None) -> LpInstance:
    """Build the formulation for the requested kind, or the kind implied by the data"""
    kind = model_kind or system.model_kind
    if kind is ModelKind.SINGLE_BUS:
        return build_single_bus_lp(system)
    return build_network_lp(system)


# =============================================================================
# Size formulas and objective cross-check
# =============================================================================


@dataclass(frozen=True)
class LpCounts:
    variables: int
    equalities: int
    inequalities: int


def expected_counts(system: MarketSystem, model_kind: Optional[ModelKind] = None) -> LpCounts:
    n_g, n_d, n_b = len(system.generators), len(system.loads), len(system.buses)
    n_k = len(system.contingencies)
    kind = model_kind or system.model_kind

    if kind is ModelKind.SINGLE_BUS:
        return LpCounts(
            variables=n_g * (2 + n_k),
            equalities=1 + n_k,
            inequalities=n_g * (n_k + 2),
        )

    views = state_views(system)
    islands = sum(len(v.islands) for v in views)
    flow_rows = 2 * sum(len(v.active_lines) for v in views)
    return LpCounts(
        variables=n_g * (3 + n_k) + n_d * (3 + n_k) + n_b * (1 + n_k),
        equalities=n_b * (1 + n_k) + islands,
        inequalities=flow_rows + n_g * (4 + 2 * n_k) + n_d * (4 + 2 * n_k),
    )


def direct_objective(
    system: MarketSystem, primal: PrimalSolution, model_kind: Optional[ModelKind] = None
) -> float:
    """Objective evaluated straight from the offers and the schedules"""
    kind = model_kind or system.model_kind
    total = 0.0
    for gen in system.generators:
        total += gen.energy_offer * primal.value(VarRole.G0, gen.id)
        total += gen.up_offer * primal.value(VarRole.R_UP, gen.id)
        if kind is ModelKind.NETWORK:
            total += gen.dn_offer * primal.value(VarRole.R_DN, gen.id)
    if kind is ModelKind.NETWORK:
        for load in system.loads:
            total -= load.utility * primal.value(VarRole.D0, load.id)
            total += load.up_offer * primal.value(VarRole.RD_UP, load.id)
            total += load.dn_offer * primal.value(VarRole.RD_DN, load.id)
    return total
