"""
Centralized logging configuration
"""
import logging
import sys
import time
from contextlib import contextmanager
from typing import Iterator, Optional, TextIO

LOGGER_NAME = 'beurling_campanato'
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logger(name: str = LOGGER_NAME, level: int = logging.INFO,
                 stream: Optional[TextIO] = None) -> logging.Logger:
    """
    Setup and configure logger with consistent formatting

    Args:
        name: Logger name
        level: Logging level
        stream: Handler stream (default: stdout); only used for the first handler

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)

    if not logger.handlers:
        handler = logging.StreamHandler(stream or sys.stdout)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)

    logger.setLevel(level)
    return logger


@contextmanager
def log_duration(task: str, level: int = logging.INFO) -> Iterator[None]:
    """Log the wall-clock time of a block under the project logger"""
    start = time.perf_counter()
    try:
        yield
    finally:
        logger.log(level, f"{task} took {time.perf_counter() - start:.2f} s")


# Create default logger
logger = setup_logger(LOGGER_NAME)
