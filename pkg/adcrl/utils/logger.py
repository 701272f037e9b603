"""
Logging configuration.

The package logger ("adcrl") writes to stdout and, when LOG_FILE is set, to
that file. Training runs additionally attach a per-run `train.log` in their
output directory for as long as the run lasts.
"""
import logging
import os
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional, Union

PACKAGE_LOGGER = "adcrl"
RUN_LOG_FILE = "train.log"

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
# ablation arms run in worker processes; their lines carry the process name
WORKER_LOG_FORMAT = "%(asctime)s - %(processName)s - %(name)s - %(levelname)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def _level(level: Optional[str]) -> int:
    if level is None:
        level = os.getenv("LOG_LEVEL", "INFO")
    return getattr(logging, level.upper(), logging.INFO)


def setup_logger(name: str = PACKAGE_LOGGER, level: Optional[str] = None, worker: bool = False) -> logging.Logger:
    """
    Setup package logger.

    Args:
        name: Logger name
        level: Log level (DEBUG, INFO, WARNING, ERROR, CRITICAL); defaults to LOG_LEVEL
        worker: Tag lines with the process name (ablation worker processes)

    Returns:
        Configured logger instance
    """
    log_level = _level(level)
    logger = logging.getLogger(name)
    logger.setLevel(log_level)

    # Avoid duplicate handlers
    if logger.handlers:
        return logger

    formatter = logging.Formatter(WORKER_LOG_FORMAT if worker else LOG_FORMAT, datefmt=DATE_FORMAT)

    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setLevel(log_level)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    log_file = os.getenv("LOG_FILE")
    if log_file:
        try:
            Path(log_file).parent.mkdir(parents=True, exist_ok=True)
            file_handler = logging.FileHandler(log_file)
            file_handler.setLevel(log_level)
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)
        except OSError as e:
            logger.warning("Could not create file handler: %s", e)

    return logger


@contextmanager
def run_log(output_dir: Union[str, Path], name: str = PACKAGE_LOGGER) -> Iterator[Path]:
    """Copy package log records into <output_dir>/train.log while the block runs."""
    path = Path(output_dir) / RUN_LOG_FILE
    path.parent.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(path, mode="w", encoding="utf-8")
    handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT))
    handler.setLevel(logging.INFO)
    logger = logging.getLogger(name)
    previous = logger.level
    # records below the logger's own level never reach any handler
    if logger.getEffectiveLevel() > logging.INFO:
        logger.setLevel(logging.INFO)
    logger.addHandler(handler)
    try:
        yield path
    finally:
        logger.removeHandler(handler)
        handler.close()
        logger.setLevel(previous)


if __name__ == "__main__":
    test_logger = setup_logger("adcrl.smoke", "DEBUG")
    test_logger.debug("Debug message")
    test_logger.info("Info message")
    test_logger.warning("Warning message")
