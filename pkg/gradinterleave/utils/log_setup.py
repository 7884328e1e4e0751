"""
Logging configuration for command-line runs.
"""

import sys

from loguru import logger

LEVELS = ("WARNING", "INFO", "DEBUG")
LOG_FORMAT = "{time:HH:mm:ss.SSS} | {level: <7} | {name}:{function} - {message}"


def configure_logging(verbosity: int = 0) -> str:
    """
    Route all records to a single stderr sink so stdout carries only reports.
    Args:
        verbosity (int): 0 for WARNING, 1 for INFO, 2 or more for DEBUG.
    Returns:
        str: The level that was set.
    """
    level = LEVELS[min(max(verbosity, 0), len(LEVELS) - 1)]
    logger.remove()
    logger.add(sys.stderr, level=level, format=LOG_FORMAT)
    return level
