# File: app/utils/decorators.py
"""
/app/utils/decorators.py
Decorators for CLI commands
"""

import logging
from functools import wraps

import click

from app.utils.errors import MarketClearError

logger = logging.getLogger(__name__)


def handle_engine_errors(f):
    """
    Decorator mapping engine errors to process exit codes.
    The error is logged and echoed to stderr; stdout stays reserved for reports.
    """

    @wraps(f)
    def decorated_function(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except MarketClearError as e:
            logger.error(f"{type(e).__name__}: {e}")
            click.echo(f"Error ({type(e).__name__}): {e}", err=True)
            raise click.exceptions.Exit(e.exit_code)

    return decorated_function
