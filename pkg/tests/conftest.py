# File: tests/conftest.py
"""
/tests/conftest.py
Shared fixtures: bundled instances, solved runs and published multipliers
"""

import os

import pytest

from app import create_app
from app.models.lp_instance import ConstraintTag, TagKind
from app.models.solution import DualSolution
from app.services.formulation import build_lp
from app.services.lpsolve import complete_dual, solve
from app.services.system_loader import load_system

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DATA_DIR = os.path.join(ROOT, "data", "systems")
GOLDEN_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "golden")

SINGLE_BUS_PATH = os.path.join(DATA_DIR, "single_bus.json")
TWO_BUS_PATH = os.path.join(DATA_DIR, "two_bus.json")


class TestConfig:
    LOG_LEVEL = "WARNING"
    TOL_FEAS = 1e-7
    TOL_GAP = 1e-6
    TOL_CS = 1e-6
    TOL_MONEY = 1e-4
    TOL_SIGN = 1e-9
    SOLVER_METHOD = "highs-ds"
    OUTPUT_FORMAT = "table"
    RECORD_TIMESTAMPS = False
    JOBS = 1

    @classmethod
    def tolerances(cls):
        from app.models.solution import Tolerances

        return Tolerances(
            feas=cls.TOL_FEAS,
            gap=cls.TOL_GAP,
            cs=cls.TOL_CS,
            money=cls.TOL_MONEY,
            sign=cls.TOL_SIGN,
        )


def read_golden(name: str) -> str:
    with open(os.path.join(GOLDEN_DIR, name), "r", encoding="utf-8") as f:
        return f.read()


def single_bus_reference_dual() -> DualSolution:
    """Balance multipliers as published for the single-bus example"""
    values = {
        ConstraintTag(TagKind.PRE_BALANCE, "B1"): 20.0,
        ConstraintTag(TagKind.POST_BALANCE, "B1", "K1"): 80.0,
        ConstraintTag(TagKind.POST_BALANCE, "B1", "K2"): 0.0,
        ConstraintTag(TagKind.POST_BALANCE, "B1", "K3"): 0.0,
    }
    return DualSolution(values=values, buses=("B1",), contingencies=("K1", "K2", "K3"))


def two_bus_reference_dual() -> DualSolution:
    """Balance and flow multipliers as published for the two-bus example"""
    post = {
        ("B1", "K1"): 180.0,
        ("B1", "K2"): 0.0,
        ("B1", "K3"): 0.0,
        ("B1", "K4"): 0.0,
        ("B2", "K1"): 85.0,
        ("B2", "K2"): 0.0,
        ("B2", "K3"): 0.0,
        ("B2", "K4"): -5.0,
    }
    values = {
        ConstraintTag(TagKind.PRE_BALANCE, "B1"): 20.0,
        ConstraintTag(TagKind.PRE_BALANCE, "B2"): 20.0,
    }
    for (bus, k), value in post.items():
        values[ConstraintTag(TagKind.POST_BALANCE, bus, k)] = value
    for state in ("0", "K1", "K2", "K3"):
        values[ConstraintTag(TagKind.FLOW_LOWER, "L12", state)] = 95.0 if state == "K1" else 0.0
        values[ConstraintTag(TagKind.FLOW_UPPER, "L12", state)] = 0.0
    return DualSolution(
        values=values,
        buses=("B1", "B2"),
        contingencies=("K1", "K2", "K3", "K4"),
        lines=("L12",),
    )


@pytest.fixture
def app():
    return create_app(TestConfig)


@pytest.fixture(scope="session")
def single_bus():
    return load_system(SINGLE_BUS_PATH)


@pytest.fixture(scope="session")
def two_bus():
    return load_system(TWO_BUS_PATH)


@pytest.fixture(scope="session")
def single_bus_solved(single_bus):
    lp = build_lp(single_bus)
    primal, dual, info = solve(lp)
    return lp, primal, dual, info


@pytest.fixture(scope="session")
def two_bus_solved(two_bus):
    lp = build_lp(two_bus)
    primal, dual, info = solve(lp)
    return lp, primal, dual, info


@pytest.fixture(scope="session")
def single_bus_published_dual(single_bus_solved):
    lp, primal, _, _ = single_bus_solved
    return complete_dual(lp, primal, single_bus_reference_dual())


@pytest.fixture(scope="session")
def two_bus_published_dual(two_bus_solved):
    lp, primal, _, _ = two_bus_solved
    return complete_dual(lp, primal, two_bus_reference_dual())
