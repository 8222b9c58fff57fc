# File: app/models/prices.py
"""
/app/models/prices.py
Price books, security charges and split contingency duals
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Mapping, Optional, Tuple


class Scheme(str, Enum):
    BASELINE = "baseline"
    PROPOSED = "proposed"


@dataclass(frozen=True)
class SplitDuals:
    """pi_plus = max(pi, 0) and pi_minus = -min(pi, 0) per (bus, contingency)"""

    plus: Mapping[Tuple[str, str], float]
    minus: Mapping[Tuple[str, str], float]

    def up(self, bus: str, k: str) -> float:
        return self.plus.get((bus, k), 0.0)

    def down(self, bus: str, k: str) -> float:
        return self.minus.get((bus, k), 0.0)


@dataclass(frozen=True)
class PriceBook:
    scheme: Scheme
    energy: Mapping[str, float]
    security: Mapping[str, float] = field(default_factory=dict)
    up: Mapping[str, float] = field(default_factory=dict)
    down: Mapping[str, float] = field(default_factory=dict)
    transmission: Mapping[str, float] = field(default_factory=dict)
    transmission_by_state: Mapping[str, Mapping[str, Optional[float]]] = field(
        default_factory=dict
    )

    @property
    def buses(self) -> Tuple[str, ...]:
        return tuple(self.energy)

    def up_reserve_price(self, bus: str) -> float:
        """Price paid for up-reserve: p_up (proposed) or p_s (baseline)"""
        if self.scheme is Scheme.BASELINE:
            return self.security.get(bus, 0.0)
        return self.up.get(bus, 0.0)

    def down_reserve_price(self, bus: str) -> float:
        if self.scheme is Scheme.BASELINE:
            return self.security.get(bus, 0.0)
        return self.down.get(bus, 0.0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scheme": self.scheme.value,
            "energy": dict(self.energy),
            "security": dict(self.security),
            "up": dict(self.up),
            "down": dict(self.down),
            "transmission": dict(self.transmission),
            "transmission_by_state": {
                line: dict(states) for line, states in self.transmission_by_state.items()
            },
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PriceBook":
        return cls(
            scheme=Scheme(data["scheme"]),
            energy=dict(data["energy"]),
            security=dict(data.get("security", {})),
            up=dict(data.get("up", {})),
            down=dict(data.get("down", {})),
            transmission=dict(data.get("transmission", {})),
            transmission_by_state={
                line: dict(states)
                for line, states in data.get("transmission_by_state", {}).items()
            },
        )


@dataclass(frozen=True)
class SecurityCharges:
    charges: Mapping[str, float]
    breakdown: Mapping[str, Mapping[str, float]] = field(default_factory=dict)

    @property
    def total(self) -> float:
        return sum(self.charges.values())

    def charge(self, generator_id: str) -> float:
        return self.charges.get(generator_id, 0.0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "charges": dict(self.charges),
            "breakdown": {g: dict(parts) for g, parts in self.breakdown.items()},
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SecurityCharges":
        return cls(
            charges=dict(data["charges"]),
            breakdown={g: dict(p) for g, p in data.get("breakdown", {}).items()},
        )
