# File: tests/test_config.py
"""
/tests/test_config.py
Environment-driven settings
"""

import logging

from app import create_app
from config import Config, get_float, get_int

from tests.conftest import TestConfig


def test_get_float_reads_environment(monkeypatch):
    monkeypatch.setenv("MARKETCLEAR_TOL_GAP", "1e-5")
    assert get_float("MARKETCLEAR_TOL_GAP", 1e-6) == 1e-5


def test_get_float_falls_back(monkeypatch):
    monkeypatch.setenv("MARKETCLEAR_TOL_GAP", "tiny")
    assert get_float("MARKETCLEAR_TOL_GAP", 1e-6) == 1e-6
    monkeypatch.setenv("MARKETCLEAR_TOL_GAP", "-1")
    assert get_float("MARKETCLEAR_TOL_GAP", 1e-6) == 1e-6
    monkeypatch.setenv("MARKETCLEAR_TOL_GAP", " ")
    assert get_float("MARKETCLEAR_TOL_GAP", 1e-6) == 1e-6


def test_get_int(monkeypatch):
    monkeypatch.delenv("MARKETCLEAR_JOBS", raising=False)
    assert get_int("MARKETCLEAR_JOBS", 1) == 1
    monkeypatch.setenv("MARKETCLEAR_JOBS", "0")
    assert get_int("MARKETCLEAR_JOBS", 1) == 1
    monkeypatch.setenv("MARKETCLEAR_JOBS", "many")
    assert get_int("MARKETCLEAR_JOBS", 3) == 3


def test_default_tolerances():
    tol = Config.tolerances()
    assert tol.sign <= tol.feas <= tol.gap <= tol.money


def test_create_app_applies_log_level():
    app = create_app(TestConfig)
    assert logging.getLogger().level == logging.WARNING
    assert app.tolerances.money == TestConfig.TOL_MONEY
