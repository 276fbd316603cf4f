"""Shared logging configuration."""
import logging
import os
import sys


def setup_logger(name: str, level: int | None = None) -> logging.Logger:
    """Configure logger for neckflow modules."""
    if level is None:
        level = getattr(logging, os.getenv("NECKFLOW_LOG_LEVEL", "INFO").upper(), logging.INFO)

    logger = logging.getLogger(name)
    logger.setLevel(level)

    if not logger.handlers:
        handler = logging.StreamHandler(sys.stdout)
        handler.setLevel(level)

        formatter = logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        )
        handler.setFormatter(formatter)

        logger.addHandler(handler)
        logger.propagate = False
    else:
        for handler in logger.handlers:
            handler.setLevel(level)
    return logger


def set_level(level: int, prefix: str = "src.") -> None:
    """Re-level every already configured neckflow logger (CLI --verbose)."""
    for name in list(logging.Logger.manager.loggerDict):
        if name.startswith(prefix) or name == "__main__":
            setup_logger(name, level)
