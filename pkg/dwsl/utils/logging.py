"""
Logging configuration for the DWSL engine using loguru.
"""

import sys
from pathlib import Path
from typing import Optional, Union

from loguru import logger

# Remove the default handler
logger.remove()

_CONSOLE_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | "
    "<cyan>{extra[name]}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - "
    "<level>{message}</level>"
)
_FILE_FORMAT = (
    "{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | "
    "{extra[name]}:{function}:{line} - {message}"
)

_LEVEL_MAP = {
    50: "CRITICAL",
    40: "ERROR",
    30: "WARNING",
    20: "INFO",
    10: "DEBUG",
    0: "TRACE",
}


def setup_logger(
    name: str = "dwsl",
    log_file: Optional[Path] = None,
    level: Union[str, int] = "INFO",
) -> "logger.__class__":
    """
    Set up a loguru logger with a console handler and an optional file handler.

    Console output goes to stderr; stdout is reserved for command results.

    Args:
        name: Name bound into every record (shown in the format string)
        log_file: Path to log file (if None, only console logging is used)
        level: Logging level as string or int

    Returns:
        Configured logger instance
    """
    if isinstance(level, int):
        level = _LEVEL_MAP.get(level, "INFO")
    level = level.upper()

    logger.remove()
    logger.configure(extra={"name": name})
    logger.add(sys.stderr, format=_CONSOLE_FORMAT, level=level)

    if log_file:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        logger.add(
            str(log_file),
            format=_FILE_FORMAT,
            level=level,
            rotation="10 MB",
        )

    context_logger = logger.bind(name=name)
    context_logger.debug(f"Logger configured at level {level}")
    return context_logger


# Default logger for the package
logger = setup_logger("dwsl")
