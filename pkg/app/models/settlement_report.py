# File: app/models/settlement_report.py
"""
/app/models/settlement_report.py
Per-agent settlement rows, system balance, verdicts and scheme comparison
"""

from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, List, Mapping, Optional, Tuple

from app.models.market_system import ModelKind
from app.models.prices import Scheme
from app.utils.errors import NumericalFailure


@dataclass(frozen=True)
class GeneratorRow:
    id: str
    revenue_energy: float
    revenue_up: float
    revenue_dn: float
    security_charge: float
    total_revenue: float
    cost_energy: float
    cost_up: float
    cost_dn: float
    total_cost: float
    profit: float

    def identity_errors(self, tol: float) -> List[str]:
        errors = []
        revenue = (
            self.revenue_energy + self.revenue_up + self.revenue_dn - self.security_charge
        )
        if abs(revenue - self.total_revenue) > tol:
            errors.append(f"generator {self.id}: total revenue {self.total_revenue} != {revenue}")
        cost = self.cost_energy + self.cost_up + self.cost_dn
        if abs(cost - self.total_cost) > tol:
            errors.append(f"generator {self.id}: total cost {self.total_cost} != {cost}")
        if abs(self.total_revenue - self.total_cost - self.profit) > tol:
            errors.append(f"generator {self.id}: profit {self.profit} inconsistent")
        return errors


@dataclass(frozen=True)
class ConsumerRow:
    """inelastic rows come from fixed demand: they only carry a payment"""

    id: str
    payment_energy: float
    revenue_up: float
    revenue_dn: float
    payment: float
    utility: float
    cost_up: float
    cost_dn: float
    total_cost: float
    profit: float
    inelastic: bool = False

    def identity_errors(self, tol: float) -> List[str]:
        errors = []
        payment = self.payment_energy - self.revenue_up - self.revenue_dn
        if abs(payment - self.payment) > tol:
            errors.append(f"consumer {self.id}: payment {self.payment} != {payment}")
        if abs(self.cost_up + self.cost_dn - self.total_cost) > tol:
            errors.append(f"consumer {self.id}: total cost inconsistent")
        if abs(self.utility - self.total_cost - self.payment - self.profit) > tol:
            errors.append(f"consumer {self.id}: profit {self.profit} inconsistent")
        return errors


@dataclass(frozen=True)
class TransmissionRow:
    line_id: str
    price: float
    capacity: float
    revenue: float


@dataclass(frozen=True)
class SystemBalance:
    consumer_payment: float
    generation_revenue: float
    transmission_revenue: float
    balance: float


@dataclass(frozen=True)
class SettlementReport:
    scheme: Scheme
    model_kind: ModelKind
    generators: Tuple[GeneratorRow, ...]
    consumers: Tuple[ConsumerRow, ...]
    transmission: Tuple[TransmissionRow, ...]
    balance: SystemBalance
    security_breakdown: Mapping[str, Mapping[str, float]] = field(default_factory=dict)

    def generator(self, generator_id: str) -> GeneratorRow:
        return next(row for row in self.generators if row.id == generator_id)

    def consumer(self, load_id: str) -> ConsumerRow:
        return next(row for row in self.consumers if row.id == load_id)

    def identity_errors(self, tol: float) -> List[str]:
        errors: List[str] = []
        for row in self.generators:
            errors.extend(row.identity_errors(tol))
        for row in self.consumers:
            errors.extend(row.identity_errors(tol))
        for row in self.transmission:
            if row.revenue < -tol:
                errors.append(f"line {row.line_id}: negative revenue {row.revenue}")
        b = self.balance
        expected = b.consumer_payment - b.generation_revenue - b.transmission_revenue
        if abs(expected - b.balance) > tol:
            errors.append(f"system balance {b.balance} != {expected}")
        return errors

    def assert_identities(self, tol: float = 1e-9) -> None:
        errors = self.identity_errors(tol)
        if errors:
            raise NumericalFailure(
                "Settlement identities violated: " + "; ".join(errors),
                diagnostics={"errors": errors},
            )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scheme": self.scheme.value,
            "model_kind": self.model_kind.value,
            "generators": [asdict(row) for row in self.generators],
            "consumers": [asdict(row) for row in self.consumers],
            "transmission": [asdict(row) for row in self.transmission],
            "balance": asdict(self.balance),
            "security_breakdown": {
                g: dict(parts) for g, parts in self.security_breakdown.items()
            },
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SettlementReport":
        return cls(
            scheme=Scheme(data["scheme"]),
            model_kind=ModelKind(data["model_kind"]),
            generators=tuple(GeneratorRow(**row) for row in data["generators"]),
            consumers=tuple(ConsumerRow(**row) for row in data["consumers"]),
            transmission=tuple(TransmissionRow(**row) for row in data["transmission"]),
            balance=SystemBalance(**data["balance"]),
            security_breakdown={
                g: dict(p) for g, p in data.get("security_breakdown", {}).items()
            },
        )


@dataclass(frozen=True)
class Verdict:
    name: str
    passed: bool
    detail: str = ""
    offenders: Tuple[str, ...] = ()
    informational: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "detail": self.detail,
            "offenders": list(self.offenders),
            "informational": self.informational,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Verdict":
        return cls(
            name=data["name"],
            passed=data["passed"],
            detail=data.get("detail", ""),
            offenders=tuple(data.get("offenders", ())),
            informational=data.get("informational", False),
        )


GENERATOR_MONEY_FIELDS = tuple(f.name for f in fields(GeneratorRow) if f.name != "id")
CONSUMER_MONEY_FIELDS = tuple(
    f.name for f in fields(ConsumerRow) if f.name not in ("id", "inelastic")
)


@dataclass(frozen=True)
class SchemeComparison:
    """Proposed minus baseline, per agent and per money field"""

    generator_deltas: Mapping[str, Mapping[str, float]]
    consumer_deltas: Mapping[str, Mapping[str, float]]
    balance_delta: float
    security_charge_total: float
    missing_money: float
    identity_holds: Optional[bool] = None
    profit_inflation: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "generator_deltas": {k: dict(v) for k, v in self.generator_deltas.items()},
            "consumer_deltas": {k: dict(v) for k, v in self.consumer_deltas.items()},
            "balance_delta": self.balance_delta,
            "security_charge_total": self.security_charge_total,
            "missing_money": self.missing_money,
            "identity_holds": self.identity_holds,
            "profit_inflation": self.profit_inflation,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SchemeComparison":
        return cls(
            generator_deltas={k: dict(v) for k, v in data["generator_deltas"].items()},
            consumer_deltas={k: dict(v) for k, v in data["consumer_deltas"].items()},
            balance_delta=data["balance_delta"],
            security_charge_total=data["security_charge_total"],
            missing_money=data["missing_money"],
            identity_holds=data.get("identity_holds"),
            profit_inflation=data.get("profit_inflation"),
        )
