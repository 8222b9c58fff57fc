# File: app/models/archive.py
"""
/app/models/archive.py
Scenario configuration and the archive of one clearing run
"""

import os
from dataclasses import dataclass, field
from typing import Any, Dict, Mapping, Optional, Tuple

from app.models.market_system import ModelKind
from app.models.prices import PriceBook, Scheme, SecurityCharges
from app.models.settlement_report import SchemeComparison, SettlementReport, Verdict
from app.models.solution import (
    DualSolution,
    OptimalityReport,
    PrimalSolution,
    SolverInfo,
    Tolerances,
)
from app.utils.errors import ConfigError

OUTPUT_FORMATS = ("table", "json", "csv")


def parse_schemes(value: str) -> Tuple[Scheme, ...]:
    """'both' -> baseline and proposed; otherwise a single scheme name"""
    value = (value or "").strip().lower()
    if value == "both":
        return (Scheme.BASELINE, Scheme.PROPOSED)
    if not value:
        return ()
    try:
        return (Scheme(value),)
    except ValueError:
        raise ConfigError(f"Unknown scheme '{value}' (expected baseline, proposed or both)")


@dataclass(frozen=True)
class ScenarioConfig:
    system_path: str
    schemes: Tuple[Scheme, ...] = (Scheme.BASELINE, Scheme.PROPOSED)
    model_kind: Optional[ModelKind] = None
    tolerances: Tolerances = field(default_factory=Tolerances)
    output_format: str = "table"
    output_path: Optional[str] = None
    export_lp: Optional[str] = None
    solver_method: str = "highs-ds"
    record_timestamps: bool = False

    def validate(self) -> "ScenarioConfig":
        if not self.schemes:
            raise ConfigError("At least one scheme must be selected")
        if self.output_format not in OUTPUT_FORMATS:
            raise ConfigError(
                f"Unknown output format '{self.output_format}' "
                f"(expected one of {', '.join(OUTPUT_FORMATS)})"
            )
        if not os.path.isfile(self.system_path):
            raise ConfigError(f"System file not found: {self.system_path}")
        return self


@dataclass(frozen=True)
class RunArchive:
    input_hash: str
    system_path: str
    model_kind: ModelKind
    objective: float
    solver: SolverInfo
    primal: PrimalSolution
    dual: DualSolution
    optimality: OptimalityReport
    price_books: Mapping[Scheme, PriceBook]
    reports: Mapping[Scheme, SettlementReport]
    verdicts: Tuple[Verdict, ...]
    charges: Optional[SecurityCharges] = None
    comparison: Optional[SchemeComparison] = None
    tolerances: Tolerances = field(default_factory=Tolerances)
    timestamps: Mapping[str, str] = field(default_factory=dict)

    @property
    def schemes(self) -> Tuple[Scheme, ...]:
        return tuple(s for s in (Scheme.BASELINE, Scheme.PROPOSED) if s in self.reports)

    @property
    def passed(self) -> bool:
        """Optimality certified and every non-informational verdict passed"""
        return self.optimality.passed and all(
            v.passed for v in self.verdicts if not v.informational
        )

    def verdict(self, name: str) -> Verdict:
        return next(v for v in self.verdicts if v.name == name)

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "input_hash": self.input_hash,
            "system_path": self.system_path,
            "model_kind": self.model_kind.value,
            "objective": self.objective,
            "solver": self.solver.to_dict(),
            "tolerances": self.tolerances.to_dict(),
            "primal": self.primal.to_dict(),
            "dual": self.dual.to_dict(),
            "optimality": self.optimality.to_dict(),
            "price_books": {s.value: b.to_dict() for s, b in self.price_books.items()},
            "reports": {s.value: r.to_dict() for s, r in self.reports.items()},
            "verdicts": [v.to_dict() for v in self.verdicts],
            "charges": self.charges.to_dict() if self.charges else None,
            "comparison": self.comparison.to_dict() if self.comparison else None,
            "passed": self.passed,
        }
        if self.timestamps:
            data["timestamps"] = dict(self.timestamps)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunArchive":
        return cls(
            input_hash=data["input_hash"],
            system_path=data["system_path"],
            model_kind=ModelKind(data["model_kind"]),
            objective=data["objective"],
            solver=SolverInfo.from_dict(data["solver"]),
            tolerances=Tolerances(**data.get("tolerances", {})),
            primal=PrimalSolution.from_dict(data["primal"]),
            dual=DualSolution.from_dict(data["dual"]),
            optimality=OptimalityReport.from_dict(data["optimality"]),
            price_books={
                Scheme(s): PriceBook.from_dict(b) for s, b in data["price_books"].items()
            },
            reports={
                Scheme(s): SettlementReport.from_dict(r) for s, r in data["reports"].items()
            },
            verdicts=tuple(Verdict.from_dict(v) for v in data["verdicts"]),
            charges=SecurityCharges.from_dict(data["charges"]) if data.get("charges") else None,
            comparison=(
                SchemeComparison.from_dict(data["comparison"])
                if data.get("comparison")
                else None
            ),
            timestamps=dict(data.get("timestamps", {})),
        )
