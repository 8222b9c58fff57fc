# File: app/routes/__init__.py
"""
/app/routes/__init__.py
Command registry for the market clearing CLI
"""

from app.routes.cli import cli

__all__ = ["cli"]
