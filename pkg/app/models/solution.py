# File: app/models/solution.py
"""
/app/models/solution.py
Primal schedules, dual multipliers and optimality certificates
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple

from app.models.lp_instance import (
    ConstraintTag,
    TagKind,
    VarKey,
    VarRole,
    parse_var_name,
    var_name,
)
from app.models.market_system import PRE_CONTINGENCY


@dataclass(frozen=True)
class Tolerances:
    feas: float = 1e-7
    gap: float = 1e-6
    cs: float = 1e-6
    money: float = 1e-4
    sign: float = 1e-9

    def replace(self, **overrides) -> "Tolerances":
        values = self.to_dict()
        values.update({k: v for k, v in overrides.items() if v is not None})
        return Tolerances(**values)

    def to_dict(self) -> Dict[str, float]:
        return {
            "feas": self.feas,
            "gap": self.gap,
            "cs": self.cs,
            "money": self.money,
            "sign": self.sign,
        }


@dataclass(frozen=True)
class GeneratorSchedule:
    """
    Commitment of one generator. r_dn=None marks the single-bus form,
    which has no lower link between base output and contingency output.
    """

    g0: float
    r_up: float
    r_dn: Optional[float] = 0.0


@dataclass(frozen=True)
class LoadSchedule:
    d0: float
    r_up: float = 0.0
    r_dn: float = 0.0


@dataclass(frozen=True)
class PrimalSolution:
    values: Mapping[VarKey, float]
    objective: float

    def value(self, role: VarRole, owner: str, state: Optional[str] = None) -> float:
        return self.values.get((role, owner, state), 0.0)

    def has(self, role: VarRole, owner: str, state: Optional[str] = None) -> bool:
        return (role, owner, state) in self.values

    def generator_schedule(self, generator_id: str) -> GeneratorSchedule:
        r_dn = (
            self.value(VarRole.R_DN, generator_id)
            if self.has(VarRole.R_DN, generator_id)
            else None
        )
        return GeneratorSchedule(
            g0=self.value(VarRole.G0, generator_id),
            r_up=self.value(VarRole.R_UP, generator_id),
            r_dn=r_dn,
        )

    def load_schedule(self, load_id: str) -> LoadSchedule:
        return LoadSchedule(
            d0=self.value(VarRole.D0, load_id),
            r_up=self.value(VarRole.RD_UP, load_id),
            r_dn=self.value(VarRole.RD_DN, load_id),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "objective": self.objective,
            "values": {var_name(*key): v for key, v in self.values.items()},
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PrimalSolution":
        return cls(
            values={parse_var_name(name): v for name, v in data["values"].items()},
            objective=data["objective"],
        )


@dataclass(frozen=True)
class DualSolution:
    """
    Multipliers keyed by constraint tag, reported with the market signs:
    balance duals are free, FlowLower is pi_f_plus >= 0, FlowUpper is
    pi_f_minus <= 0 and every other inequality dual is >= 0.
    """

    values: Mapping[ConstraintTag, float]
    buses: Tuple[str, ...]
    contingencies: Tuple[str, ...] = ()
    lines: Tuple[str, ...] = ()

    @property
    def states(self) -> Tuple[str, ...]:
        return (PRE_CONTINGENCY,) + tuple(self.contingencies)

    def energy(self, bus: str) -> float:
        """pi_0 at a bus"""
        return self.values.get(ConstraintTag(TagKind.PRE_BALANCE, bus), 0.0)

    def contingency(self, bus: str, k: str) -> float:
        """pi_k at a bus"""
        return self.values.get(ConstraintTag(TagKind.POST_BALANCE, bus, k), 0.0)

    def balance(self, bus: str, state: str) -> float:
        if state == PRE_CONTINGENCY:
            return self.energy(bus)
        return self.contingency(bus, state)

    def flow_plus(self, line: str, state: str) -> Optional[float]:
        return self.values.get(ConstraintTag(TagKind.FLOW_LOWER, line, state))

    def flow_minus(self, line: str, state: str) -> Optional[float]:
        return self.values.get(ConstraintTag(TagKind.FLOW_UPPER, line, state))

    def flow(self, line: str, state: str) -> Optional[float]:
        """Combined flow dual pi_f = pi_f_plus + pi_f_minus; None when the line has no rows"""
        plus, minus = self.flow_plus(line, state), self.flow_minus(line, state)
        if plus is None and minus is None:
            return None
        return (plus or 0.0) + (minus or 0.0)

    def missing(self, tags: Iterable[ConstraintTag]) -> List[ConstraintTag]:
        return [tag for tag in tags if tag not in self.values]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "buses": list(self.buses),
            "contingencies": list(self.contingencies),
            "lines": list(self.lines),
            "values": {str(tag): v for tag, v in self.values.items()},
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DualSolution":
        return cls(
            values={ConstraintTag.parse(t): v for t, v in data["values"].items()},
            buses=tuple(data["buses"]),
            contingencies=tuple(data.get("contingencies", ())),
            lines=tuple(data.get("lines", ())),
        )


@dataclass(frozen=True)
class OptimalityReport:
    duality_gap: float
    max_kkt_residual: float
    primal_residual: float
    slackness_violation: float
    flow_pair_violation: float = 0.0
    sign_violations: Tuple[str, ...] = ()
    failures: Tuple[str, ...] = ()
    completed_tags: int = 0

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "duality_gap": self.duality_gap,
            "max_kkt_residual": self.max_kkt_residual,
            "primal_residual": self.primal_residual,
            "slackness_violation": self.slackness_violation,
            "flow_pair_violation": self.flow_pair_violation,
            "sign_violations": list(self.sign_violations),
            "failures": list(self.failures),
            "completed_tags": self.completed_tags,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "OptimalityReport":
        return cls(
            duality_gap=data["duality_gap"],
            max_kkt_residual=data["max_kkt_residual"],
            primal_residual=data["primal_residual"],
            slackness_violation=data["slackness_violation"],
            flow_pair_violation=data.get("flow_pair_violation", 0.0),
            sign_violations=tuple(data.get("sign_violations", ())),
            failures=tuple(data.get("failures", ())),
            completed_tags=data.get("completed_tags", 0),
        )


class DualMatch(str, Enum):
    MATCH = "MATCH"
    ALTERNATE_OPTIMUM = "ALTERNATE-OPTIMUM"
    MISMATCH = "MISMATCH"


@dataclass(frozen=True)
class SolverInfo:
    method: str
    status: int
    message: str = ""
    iterations: int = 0
    extra: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "method": self.method,
            "status": self.status,
            "message": self.message,
            "iterations": self.iterations,
        }
        data.update(self.extra)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SolverInfo":
        known = {"method", "status", "message", "iterations"}
        return cls(
            method=data["method"],
            status=data["status"],
            message=data.get("message", ""),
            iterations=data.get("iterations", 0),
            extra={k: v for k, v in data.items() if k not in known},
        )
