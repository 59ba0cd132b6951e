"""
Utility modules for the restricted Beurling transform toolkit
"""
from .logger_config import setup_logger, log_duration, logger, LOGGER_NAME

__all__ = ['setup_logger', 'log_duration', 'logger', 'LOGGER_NAME']
