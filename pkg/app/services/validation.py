# File: app/services/validation.py
"""
/app/services/validation.py
Invariant checks for market instances
"""

import logging
import math
from collections import Counter
from typing import Iterable, List

from app.models.market_system import PRE_CONTINGENCY, MarketSystem, ModelKind
from app.models.network import build_matrices, find_islands
from app.utils.errors import SystemValidationError, Violation, ViolationKind

logger = logging.getLogger(__name__)


def _duplicates(kind: str, ids: Iterable[str]) -> List[Violation]:
    counts = Counter(ids)
    return [
        Violation(ViolationKind.DUPLICATE_ID, f"{kind} id '{i}' appears {n} times")
        for i, n in sorted(counts.items())
        if n > 1
    ]


def _non_finite(owner: str, **params) -> List[Violation]:
    return [
        Violation(ViolationKind.NON_FINITE, f"{owner}: {name} = {value} is not finite")
        for name, value in params.items()
        if value is not None and not math.isfinite(value)
    ]


def _negative(owner: str, **params) -> List[Violation]:
    return [
        Violation(ViolationKind.NEGATIVE_PARAMETER, f"{owner}: {name} = {value} < 0")
        for name, value in params.items()
        if value is not None and math.isfinite(value) and value < 0
    ]


def collect_violations(system: MarketSystem) -> List[Violation]:
    """Every invariant violation of the instance, in a stable order"""
    violations: List[Violation] = []

    # Sets
    if not system.buses:
        violations.append(Violation(ViolationKind.EMPTY_SET, "system has no buses"))
    if not system.generators:
        violations.append(Violation(ViolationKind.EMPTY_SET, "system has no generators"))

    # Ids
    violations += _duplicates("bus", (b.id for b in system.buses))
    violations += _duplicates("generator", (g.id for g in system.generators))
    violations += _duplicates("load", (d.id for d in system.loads))
    violations += _duplicates("line", (line.id for line in system.lines))
    violations += _duplicates("contingency", (k.id for k in system.contingencies))

    bus_ids = set(system.bus_ids)
    flagged = [b.id for b in system.buses if b.is_reference]
    if len(flagged) > 1:
        violations.append(
            Violation(
                ViolationKind.REFERENCE_BUS,
                f"more than one reference bus flagged: {', '.join(flagged)}",
            )
        )

    violations += _non_finite(
        "system", base_mva=system.base_mva, period_hours=system.period_hours
    )
    if system.base_mva <= 0:
        violations.append(
            Violation(ViolationKind.NEGATIVE_PARAMETER, f"base_mva = {system.base_mva} <= 0")
        )
    if system.period_hours <= 0:
        violations.append(
            Violation(
                ViolationKind.NEGATIVE_PARAMETER,
                f"period_hours = {system.period_hours} <= 0",
            )
        )

    for gen in system.generators:
        if gen.bus not in bus_ids:
            violations.append(
                Violation(
                    ViolationKind.DANGLING_REFERENCE,
                    f"generator {gen.id} sits on unknown bus '{gen.bus}'",
                )
            )
        params = dict(
            g_max=gen.g_max,
            r_up_max=gen.r_up_max,
            r_dn_max=gen.r_dn_max,
            energy_offer=gen.energy_offer,
            up_offer=gen.up_offer,
            dn_offer=gen.dn_offer,
        )
        violations += _non_finite(f"generator {gen.id}", **params)
        violations += _negative(f"generator {gen.id}", **params)

    for load in system.loads:
        if load.bus not in bus_ids:
            violations.append(
                Violation(
                    ViolationKind.DANGLING_REFERENCE,
                    f"load {load.id} sits on unknown bus '{load.bus}'",
                )
            )
        violations += _non_finite(
            f"load {load.id}",
            d_max=load.d_max,
            r_up_max=load.r_up_max,
            r_dn_max=load.r_dn_max,
            utility=load.utility,
            up_offer=load.up_offer,
            dn_offer=load.dn_offer,
            fixed_demand=load.fixed_demand,
        )
        violations += _negative(
            f"load {load.id}",
            d_max=load.d_max,
            r_up_max=load.r_up_max,
            r_dn_max=load.r_dn_max,
            fixed_demand=load.fixed_demand,
        )

    for line in system.lines:
        for end in (line.from_bus, line.to_bus):
            if end not in bus_ids:
                violations.append(
                    Violation(
                        ViolationKind.DANGLING_REFERENCE,
                        f"line {line.id} ends at unknown bus '{end}'",
                    )
                )
        if line.from_bus == line.to_bus:
            violations.append(
                Violation(
                    ViolationKind.SELF_LOOP,
                    f"line {line.id} starts and ends at bus '{line.from_bus}'",
                )
            )
        violations += _non_finite(
            f"line {line.id}", reactance=line.reactance, capacity=line.capacity
        )
        if line.reactance <= 0:
            violations.append(
                Violation(
                    ViolationKind.NEGATIVE_PARAMETER,
                    f"line {line.id}: reactance = {line.reactance} <= 0",
                )
            )
        violations += _negative(f"line {line.id}", capacity=line.capacity)

    gen_ids = {g.id for g in system.generators}
    line_ids = {line.id for line in system.lines}
    for k in system.contingencies:
        if k.id == PRE_CONTINGENCY:
            violations.append(
                Violation(
                    ViolationKind.INVALID_CONTINGENCY,
                    f"contingency id '{k.id}' is reserved for the pre-contingency state",
                )
            )
        if k.is_empty:
            violations.append(
                Violation(
                    ViolationKind.INVALID_CONTINGENCY,
                    f"contingency {k.id} outages nothing",
                )
            )
        for gen_id in sorted(k.outaged_generators - gen_ids):
            violations.append(
                Violation(
                    ViolationKind.DANGLING_REFERENCE,
                    f"contingency {k.id} outages unknown generator '{gen_id}'",
                )
            )
        for line_id in sorted(k.outaged_lines - line_ids):
            violations.append(
                Violation(
                    ViolationKind.DANGLING_REFERENCE,
                    f"contingency {k.id} outages unknown line '{line_id}'",
                )
            )

    # Connectivity only makes sense once the topology references resolve
    blocking = {
        ViolationKind.DANGLING_REFERENCE,
        ViolationKind.DUPLICATE_ID,
        ViolationKind.SELF_LOOP,
        ViolationKind.EMPTY_SET,
    }
    topology_ok = not any(v.kind in blocking for v in violations) and all(
        line.reactance > 0 for line in system.lines
    )
    if topology_ok and system.model_kind is ModelKind.NETWORK and len(system.buses) > 1:
        matrices = build_matrices(system)
        islands = find_islands(matrices.bus_ids, matrices.incidence)
        if len(islands) > 1:
            parts = " | ".join(
                ", ".join(b for b in system.bus_ids if b in island) for island in islands
            )
            violations.append(
                Violation(
                    ViolationKind.DISCONNECTED_NETWORK,
                    f"pre-contingency network has {len(islands)} islands: {parts}",
                )
            )

    return violations


def validate_system(system: MarketSystem) -> MarketSystem:
    """Return the system unchanged if every invariant holds; raise with all violations otherwise"""
    violations = collect_violations(system)
    if violations:
        logger.warning(f"System rejected with {len(violations)} violation(s)")
        raise SystemValidationError(violations)
    logger.debug(
        f"System valid: {len(system.buses)} buses, {len(system.generators)} generators, "
        f"{len(system.loads)} loads, {len(system.lines)} lines, "
        f"{len(system.contingencies)} contingencies ({system.model_kind.value})"
    )
    return system
