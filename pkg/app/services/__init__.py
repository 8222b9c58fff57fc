# File: app/services/__init__.py
"""
/app/services/__init__.py
Service layer for the market clearing engine
"""

from app.services.formulation import build_lp
from app.services.lpsolve import check_kkt, solve
from app.services.pricing import price_baseline, price_proposed, security_charges
from app.services.scenario import run_batch, run_scenario
from app.services.settlement import settle
from app.services.system_loader import load_system
from app.services.validation import validate_system

__all__ = [
    "build_lp",
    "check_kkt",
    "solve",
    "price_baseline",
    "price_proposed",
    "security_charges",
    "run_batch",
    "run_scenario",
    "settle",
    "load_system",
    "validate_system",
]
