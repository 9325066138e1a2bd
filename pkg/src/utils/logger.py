"""
Logger configuration for the A/B testing toolkit.

Provides structured logging with rich formatting for console output.
"""

import logging
from rich.logging import RichHandler
from rich.console import Console

from config.settings import settings


def setup_logger(name: str = "queue_ab", level: int = logging.INFO) -> logging.Logger:
    """
    Set up a logger with rich console output.

    Calling it again on an existing logger only adjusts the level, so the
    CLI can switch to DEBUG after import time.

    Args:
        name: Logger name
        level: Logging level

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)
    logger.setLevel(level)

    # Avoid adding handlers multiple times
    if logger.handlers:
        for handler in logger.handlers:
            handler.setLevel(level)
        return logger

    # Log to stderr so CSV written to stdout stays clean
    console = Console(stderr=True)
    handler = RichHandler(
        console=console,
        rich_tracebacks=True,
        markup=True,
        show_time=True,
        show_path=False
    )

    handler.setLevel(level)
    formatter = logging.Formatter(
        "%(message)s",
        datefmt="[%X]"
    )
    handler.setFormatter(formatter)

    logger.addHandler(handler)

    return logger


# Package logger at the configured level
logger = setup_logger(level=logging.getLevelName(settings.log_level.upper()))
