"""
Logging configuration for dalpha-seeding.

This module configures the package's logging system using Loguru,
providing consistent formatting and optional file rotation.
"""

import logging
import sys
from typing import Optional

from loguru import logger

from dalpha_seeding.config import get_config

# Remove default handler; nothing is emitted until configure_logging() runs
logger.remove()

_configured = False


class InterceptHandler(logging.Handler):
    """Route standard library log records into Loguru."""

    def emit(self, record: logging.LogRecord) -> None:
        try:
            level = logger.level(record.levelname).name
        except ValueError:
            level = record.levelno

        # Find caller from where originated the logged message
        frame, depth = logging.currentframe(), 2
        while frame is not None and frame.f_code.co_filename == logging.__file__:
            frame = frame.f_back
            depth += 1

        logger.opt(depth=depth, exception=record.exc_info).log(level, record.getMessage())


def configure_logging(level: Optional[str] = None) -> None:
    """
    Configure the package's logging system.

    Safe to call more than once; later calls replace the sinks.

    Args:
        level: Optional override of the configured log level
    """
    global _configured
    log_config = get_config().logging
    run_level = (level or log_config.level).upper()

    logger.remove()
    logger.add(
        sys.stderr,
        level=run_level,
        format=log_config.format,
        colorize=True,
    )

    if log_config.save_to_file and log_config.log_file:
        logger.add(
            str(log_config.log_file),
            level=run_level,
            format=log_config.format,
            rotation=log_config.rotation,
            retention=log_config.retention,
            compression="zip",
        )

    logging.basicConfig(handlers=[InterceptHandler()], level=0, force=True)

    if not _configured:
        logger.debug("Logging system configured")
    _configured = True


def get_logger(name: Optional[str] = None) -> logger.__class__:
    """
    Get a logger instance with the specified name.

    Args:
        name: Optional name for the logger (typically the module name)

    Returns:
        Logger bound to the given name
    """
    return logger.bind(name=name)
