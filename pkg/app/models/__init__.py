# File: app/models/__init__.py
"""
/app/models/__init__.py
Domain types for the market clearing engine
"""

from app.models.market_system import (
    Bus,
    Contingency,
    Generator,
    Line,
    Load,
    MarketSystem,
    ModelKind,
    PRE_CONTINGENCY,
)
from app.models.lp_instance import ConstraintTag, LpInstance, TagKind, VarRole
from app.models.solution import DualSolution, PrimalSolution, Tolerances
from app.models.prices import PriceBook, Scheme, SecurityCharges, SplitDuals
from app.models.settlement_report import SettlementReport, Verdict
from app.models.archive import RunArchive, ScenarioConfig

__all__ = [
    "Bus",
    "Contingency",
    "Generator",
    "Line",
    "Load",
    "MarketSystem",
    "ModelKind",
    "PRE_CONTINGENCY",
    "ConstraintTag",
    "LpInstance",
    "TagKind",
    "VarRole",
    "DualSolution",
    "PrimalSolution",
    "Tolerances",
    "PriceBook",
    "Scheme",
    "SecurityCharges",
    "SplitDuals",
    "SettlementReport",
    "Verdict",
    "RunArchive",
    "ScenarioConfig",
]
