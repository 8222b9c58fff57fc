# File: run.py
"""
/run.py
Application entry point
"""

from app.routes.cli import cli

if __name__ == "__main__":
    cli()
