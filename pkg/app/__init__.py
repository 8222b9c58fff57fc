# File: app/__init__.py
"""
/app/__init__.py
Application factory and initialization
"""

import logging
import sys
from dataclasses import dataclass
from typing import Optional

from config import Config
from app.models.archive import ScenarioConfig, parse_schemes
from app.models.market_system import ModelKind
from app.models.solution import Tolerances


def configure_logging(config) -> None:
    """Configure application logging"""
    log_level = getattr(logging, str(config.LOG_LEVEL).upper(), logging.INFO)

    # Create formatter
    formatter = logging.Formatter(
        "[%(asctime)s] %(levelname)s in %(module)s: %(message)s"
    )

    # Configure root logger
    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)

    # Remove existing handlers
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    # Console handler on stderr; stdout carries the rendered reports
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(log_level)
    console_handler.setFormatter(formatter)
    root_logger.addHandler(console_handler)

    # Suppress noisy loggers
    logging.getLogger("pyomo").setLevel(logging.WARNING)


@dataclass
class MarketApp:
    """Configured engine: settings plus the helpers the CLI needs"""

    config: type
    tolerances: Tolerances
    logger: logging.Logger

    def scenario_config(
        self,
        system_path: str,
        scheme: str = "both",
        output_format: Optional[str] = None,
        output_path: Optional[str] = None,
        model_kind: Optional[str] = None,
        tol_gap: Optional[float] = None,
        tol_money: Optional[float] = None,
        export_lp: Optional[str] = None,
    ) -> ScenarioConfig:
        return ScenarioConfig(
            system_path=system_path,
            schemes=parse_schemes(scheme),
            model_kind=ModelKind(model_kind) if model_kind else None,
            tolerances=self.tolerances.replace(gap=tol_gap, money=tol_money),
            output_format=output_format or self.config.OUTPUT_FORMAT,
            output_path=output_path,
            export_lp=export_lp,
            solver_method=self.config.SOLVER_METHOD,
            record_timestamps=self.config.RECORD_TIMESTAMPS,
        ).validate()


def create_app(config_class=Config) -> MarketApp:
    configure_logging(config_class)
    app = MarketApp(
        config=config_class,
        tolerances=config_class.tolerances(),
        logger=logging.getLogger("app"),
    )
    app.logger.debug(
        f"Engine configured: solver={config_class.SOLVER_METHOD}, "
        f"tolerances={app.tolerances.to_dict()}"
    )
    return app
