# File: app/models/lp_instance.py
"""
/app/models/lp_instance.py
Tagged linear program: variables and constraints carry the market meaning
"""

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np

from app.models.market_system import ModelKind


class TagKind(str, Enum):
    PRE_BALANCE = "PreBalance"
    POST_BALANCE = "PostBalance"
    FLOW_UPPER = "FlowUpper"
    FLOW_LOWER = "FlowLower"
    GEN_UP_LINK = "GenUpLink"
    GEN_DN_LINK = "GenDnLink"
    GEN_CAP_UP = "GenCapUp"
    GEN_CAP_DN = "GenCapDn"
    GEN_RES_UP_CAP = "GenResUpCap"
    GEN_RES_DN_CAP = "GenResDnCap"
    DEM_UP_LINK = "DemUpLink"
    DEM_DN_LINK = "DemDnLink"
    DEM_LOWER = "DemLower"
    DEM_UPPER = "DemUpper"
    DEM_RES_UP_CAP = "DemResUpCap"
    DEM_RES_DN_CAP = "DemResDnCap"
    REF_ANGLE = "RefAngle"


_TAG_PATTERN = re.compile(r"^(\w+)\(([^,()]+)(?:,\s*([^,()]+))?\)$")


@dataclass(frozen=True)
class ConstraintTag:
    """Market meaning of one LP row, e.g. PostBalance(B2, K4)"""

    kind: TagKind
    element: str
    state: Optional[str] = None

    def __str__(self):
        if self.state is None:
            return f"{self.kind.value}({self.element})"
        return f"{self.kind.value}({self.element}, {self.state})"

    @classmethod
    def parse(cls, text: str) -> "ConstraintTag":
        match = _TAG_PATTERN.match(text.strip())
        if not match:
            raise ValueError(f"Malformed constraint tag '{text}'")
        kind, element, state = match.groups()
        return cls(TagKind(kind), element.strip(), state.strip() if state else None)


class VarRole(str, Enum):
    G0 = "g0"
    R_UP = "r_up"
    R_DN = "r_dn"
    G_K = "g_k"
    D0 = "d0"
    RD_UP = "rd_up"
    RD_DN = "rd_dn"
    D_K = "d_k"
    THETA = "theta"


VarKey = Tuple[VarRole, str, Optional[str]]


def var_name(role: VarRole, owner: str, state: Optional[str] = None) -> str:
    if state is None:
        return f"{role.value}[{owner}]"
    return f"{role.value}[{owner},{state}]"


def parse_var_name(name: str) -> VarKey:
    role, _, rest = name.partition("[")
    owner, _, state = rest.rstrip("]").partition(",")
    return VarRole(role), owner, state or None


class Sense(str, Enum):
    EQ = "=="
    LE = "<="


@dataclass(frozen=True)
class Variable:
    role: VarRole
    owner: str
    state: Optional[str] = None
    lower: Optional[float] = 0.0
    upper: Optional[float] = None
    cost: float = 0.0

    @property
    def key(self) -> VarKey:
        return (self.role, self.owner, self.state)

    @property
    def name(self) -> str:
        return var_name(self.role, self.owner, self.state)

    @property
    def is_free(self) -> bool:
        return self.lower is None


@dataclass(frozen=True)
class Constraint:
    tag: ConstraintTag
    sense: Sense
    coefficients: Tuple[Tuple[int, float], ...]
    rhs: float = 0.0

    def activity(self, x: np.ndarray) -> float:
        return float(sum(coef * x[j] for j, coef in self.coefficients))


def to_marginal(tag: ConstraintTag, sense: Sense, value: float) -> float:
    """
    Reported dual value -> derivative of the optimum with respect to the rhs.
    Equality rows and FlowUpper report the derivative itself; every other
    <= row reports its negation so that it reads as a nonnegative price.
    The mapping is its own inverse.
    """
    if sense is Sense.EQ or tag.kind is TagKind.FLOW_UPPER:
        return value
    return -value


@dataclass(frozen=True)
class LpInstance:
    """Minimisation LP with tagged rows; immutable once built"""

    model_kind: ModelKind
    variables: Tuple[Variable, ...]
    constraints: Tuple[Constraint, ...]
    buses: Tuple[str, ...] = ()
    contingencies: Tuple[str, ...] = ()
    lines: Tuple[str, ...] = ()
    _var_index: Dict[VarKey, int] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )
    _row_index: Dict[ConstraintTag, int] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )

    def __post_init__(self):
        for j, var in enumerate(self.variables):
            if var.key in self._var_index:
                raise ValueError(f"Duplicate variable {var.name}")
            self._var_index[var.key] = j
        for r, con in enumerate(self.constraints):
            if con.tag in self._row_index:
                raise ValueError(f"Duplicate constraint tag {con.tag}")
            self._row_index[con.tag] = r

    @property
    def n_variables(self) -> int:
        return len(self.variables)

    @property
    def n_equalities(self) -> int:
        return sum(1 for c in self.constraints if c.sense is Sense.EQ)

    @property
    def n_inequalities(self) -> int:
        return sum(1 for c in self.constraints if c.sense is Sense.LE)

    @property
    def tags(self) -> Tuple[ConstraintTag, ...]:
        return tuple(c.tag for c in self.constraints)

    def index(self, role: VarRole, owner: str, state: Optional[str] = None) -> int:
        return self._var_index[(role, owner, state)]

    def row(self, tag: ConstraintTag) -> Constraint:
        return self.constraints[self._row_index[tag]]

    def has_row(self, tag: ConstraintTag) -> bool:
        return tag in self._row_index

    def cost_vector(self) -> np.ndarray:
        return np.array([v.cost for v in self.variables], dtype=float)

    def bounds(self) -> List[Tuple[Optional[float], Optional[float]]]:
        return [(v.lower, v.upper) for v in self.variables]

    def matrix(self) -> np.ndarray:
        """Dense constraint matrix, one row per constraint in order"""
        a = np.zeros((len(self.constraints), self.n_variables))
        for r, con in enumerate(self.constraints):
            for j, coef in con.coefficients:
                a[r, j] += coef
        return a

    def rhs_vector(self) -> np.ndarray:
        return np.array([c.rhs for c in self.constraints], dtype=float)

    def senses(self) -> Tuple[Sense, ...]:
        return tuple(c.sense for c in self.constraints)

    def vector(self, values: Mapping[VarKey, float]) -> np.ndarray:
        """Variable values keyed by (role, owner, state) -> ordered vector"""
        return np.array([values.get(v.key, 0.0) for v in self.variables], dtype=float)

    def evaluate_objective(self, values: Mapping[VarKey, float]) -> float:
        return float(self.cost_vector() @ self.vector(values))

