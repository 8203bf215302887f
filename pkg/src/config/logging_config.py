"""
Structured logging setup.

structlog renders on top of the stdlib logging backend so level filtering
is controlled in one place.
"""

import logging
import sys
from typing import Optional

import structlog

from .config import LOG_FORMATS, LOG_LEVELS


class LoggingConfig:
    """Installs the structlog processor chain once per process."""

    def __init__(self, level: str = "INFO", fmt: str = "json"):
        if level.upper() not in LOG_LEVELS:
            raise ValueError(f"Log level must be one of: {list(LOG_LEVELS)}")
        if fmt not in LOG_FORMATS:
            raise ValueError(f"Log format must be one of: {list(LOG_FORMATS)}")
        self.level = level.upper()
        self.fmt = fmt

    def renderer(self):
        if self.fmt == "console":
            return structlog.dev.ConsoleRenderer(colors=False)
        return structlog.processors.JSONRenderer()

    def apply(self) -> None:
        logging.basicConfig(format="%(message)s", stream=sys.stderr, level=self.level, force=True)
        structlog.configure(
            processors=[
                structlog.stdlib.filter_by_level,
                structlog.stdlib.add_logger_name,
                structlog.stdlib.add_log_level,
                structlog.stdlib.PositionalArgumentsFormatter(),
                structlog.processors.TimeStamper(fmt="iso"),
                structlog.processors.StackInfoRenderer(),
                structlog.processors.format_exc_info,
                structlog.processors.UnicodeDecoder(),
                self.renderer(),
            ],
            context_class=dict,
            logger_factory=structlog.stdlib.LoggerFactory(),
            wrapper_class=structlog.stdlib.BoundLogger,
            cache_logger_on_first_use=True,
        )


def configure_logging(level: str = "INFO", fmt: Optional[str] = None) -> LoggingConfig:
    config = LoggingConfig(level, fmt or "json")
    config.apply()
    return config
