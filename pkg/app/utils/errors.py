# File: app/utils/errors.py
"""
/app/utils/errors.py
Exception hierarchy and CLI exit codes
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional

EXIT_GENERIC = 1
EXIT_INPUT = 2
EXIT_SOLVER = 3
EXIT_VERDICT = 4


class MarketClearError(Exception):
    """Base class for every error raised by the clearing engine"""

    exit_code = EXIT_GENERIC

    def to_dict(self) -> Dict[str, Any]:
        return {"error": type(self).__name__, "message": str(self)}


class ParseError(MarketClearError):
    """Input document could not be parsed"""

    exit_code = EXIT_INPUT

    def __init__(
        self,
        message: str,
        path: Optional[str] = None,
        line: Optional[int] = None,
        column: Optional[int] = None,
        field: Optional[str] = None,
    ):
        self.path = path
        self.line = line
        self.column = column
        self.field = field
        location = []
        if path:
            location.append(str(path))
        if line is not None:
            location.append(f"line {line}")
        if column is not None:
            location.append(f"column {column}")
        if field:
            location.append(f"field '{field}'")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")


class ViolationKind(str, Enum):
    DUPLICATE_ID = "DuplicateId"
    DANGLING_REFERENCE = "DanglingReference"
    NEGATIVE_PARAMETER = "NegativeParameter"
    EMPTY_SET = "EmptySet"
    INVALID_CONTINGENCY = "InvalidContingency"
    DISCONNECTED_NETWORK = "DisconnectedPreContingencyNetwork"
    SELF_LOOP = "SelfLoopLine"
    REFERENCE_BUS = "ReferenceBus"
    NON_FINITE = "NonFiniteParameter"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    message: str

    def __str__(self):
        return f"{self.kind.value}: {self.message}"


class SystemValidationError(MarketClearError):
    """Market instance breaks one or more type invariants"""

    exit_code = EXIT_INPUT

    def __init__(self, violations: Iterable[Violation]):
        self.violations: List[Violation] = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"{len(self.violations)} validation error(s): {lines}")

    def kinds(self) -> set:
        return {v.kind for v in self.violations}

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data["violations"] = [
            {"kind": v.kind.value, "message": v.message} for v in self.violations
        ]
        return data


class ConfigError(MarketClearError):
    """Scenario configuration is unusable"""

    exit_code = EXIT_INPUT


class ModelMismatch(MarketClearError):
    """System data does not fit the requested formulation"""

    exit_code = EXIT_INPUT


class SolverError(MarketClearError):
    """Base class for LP solve failures"""

    exit_code = EXIT_SOLVER

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        self.diagnostics = diagnostics or {}
        super().__init__(message)

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data["diagnostics"] = self.diagnostics
        return data


class Infeasible(SolverError):
    pass


class Unbounded(SolverError):
    pass


class NumericalFailure(SolverError):
    pass


class SchemeMismatch(MarketClearError):
    """Security charges supplied together with a baseline price book"""


class VerdictFailure(MarketClearError):
    """A selected adequacy or neutrality verdict did not pass"""

    exit_code = EXIT_VERDICT
