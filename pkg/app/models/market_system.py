# File: app/models/market_system.py
"""
/app/models/market_system.py
Market instance: buses, generators, loads, lines and contingencies
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, FrozenSet, Optional, Tuple

PRE_CONTINGENCY = "0"


class ModelKind(str, Enum):
    SINGLE_BUS = "single-bus"
    NETWORK = "network"


@dataclass(frozen=True)
class Bus:
    id: str
    is_reference: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {"id": self.id, "is_reference": self.is_reference}


@dataclass(frozen=True)
class Generator:
    """Offer data of a generating unit"""

    id: str
    bus: str
    g_max: float
    r_up_max: float
    r_dn_max: float = 0.0
    energy_offer: float = 0.0
    up_offer: float = 0.0
    dn_offer: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "bus": self.bus,
            "g_max": self.g_max,
            "r_up_max": self.r_up_max,
            "r_dn_max": self.r_dn_max,
            "energy_offer": self.energy_offer,
            "up_offer": self.up_offer,
            "dn_offer": self.dn_offer,
        }


@dataclass(frozen=True)
class Load:
    """Bid data of a consumer; fixed_demand marks an inelastic single-bus load"""

    id: str
    bus: str
    d_max: float = 0.0
    r_up_max: float = 0.0
    r_dn_max: float = 0.0
    utility: float = 0.0
    up_offer: float = 0.0
    dn_offer: float = 0.0
    fixed_demand: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "bus": self.bus,
            "d_max": self.d_max,
            "r_up_max": self.r_up_max,
            "r_dn_max": self.r_dn_max,
            "utility": self.utility,
            "up_offer": self.up_offer,
            "dn_offer": self.dn_offer,
            "fixed_demand": self.fixed_demand,
        }


@dataclass(frozen=True)
class Line:
    id: str
    from_bus: str
    to_bus: str
    reactance: float
    capacity: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "from_bus": self.from_bus,
            "to_bus": self.to_bus,
            "reactance": self.reactance,
            "capacity": self.capacity,
        }


@dataclass(frozen=True)
class Contingency:
    id: str
    outaged_generators: FrozenSet[str] = field(default_factory=frozenset)
    outaged_lines: FrozenSet[str] = field(default_factory=frozenset)

    @property
    def is_empty(self) -> bool:
        return not self.outaged_generators and not self.outaged_lines

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "generators": sorted(self.outaged_generators),
            "lines": sorted(self.outaged_lines),
        }


@dataclass(frozen=True)
class MarketSystem:
    """Full input instance of a clearing run"""

    buses: Tuple[Bus, ...]
    generators: Tuple[Generator, ...]
    loads: Tuple[Load, ...] = ()
    lines: Tuple[Line, ...] = ()
    contingencies: Tuple[Contingency, ...] = ()
    base_mva: float = 100.0
    period_hours: float = 1.0

    @property
    def model_kind(self) -> ModelKind:
        if (
            len(self.buses) == 1
            and not self.lines
            and all(load.fixed_demand is not None for load in self.loads)
        ):
            return ModelKind.SINGLE_BUS
        return ModelKind.NETWORK

    @property
    def bus_ids(self) -> Tuple[str, ...]:
        return tuple(b.id for b in self.buses)

    @property
    def states(self) -> Tuple[str, ...]:
        """Pre-contingency label followed by every contingency id"""
        return (PRE_CONTINGENCY,) + tuple(k.id for k in self.contingencies)

    @property
    def reference_bus(self) -> Optional[str]:
        """Flagged reference bus, or the first bus when none is flagged"""
        for bus in self.buses:
            if bus.is_reference:
                return bus.id
        return self.buses[0].id if self.buses else None

    @property
    def total_fixed_demand(self) -> float:
        return sum(load.fixed_demand or 0.0 for load in self.loads)

    def generator(self, generator_id: str) -> Generator:
        for gen in self.generators:
            if gen.id == generator_id:
                return gen
        raise KeyError(generator_id)

    def load(self, load_id: str) -> Load:
        for load in self.loads:
            if load.id == load_id:
                return load
        raise KeyError(load_id)

    def line(self, line_id: str) -> Line:
        for line in self.lines:
            if line.id == line_id:
                return line
        raise KeyError(line_id)

    def off_contingencies(self, generator_id: str) -> Tuple[str, ...]:
        """Ids of the contingencies in which the generator is out of service"""
        return tuple(
            k.id for k in self.contingencies if generator_id in k.outaged_generators
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "buses": [b.to_dict() for b in self.buses],
            "generators": [g.to_dict() for g in self.generators],
            "loads": [d.to_dict() for d in self.loads],
            "lines": [line.to_dict() for line in self.lines],
            "contingencies": [k.to_dict() for k in self.contingencies],
            "base_mva": self.base_mva,
            "period_hours": self.period_hours,
        }
