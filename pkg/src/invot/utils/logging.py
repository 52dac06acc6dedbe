"""
Structured JSON logging.

Console output goes to stderr; an optional rotating sidecar file collects the
run log (timestamps and timings live there, never in artifacts).
"""

import json
import logging
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Optional, Union


class JsonFormatter(logging.Formatter):
    """Render log records as one JSON object per line."""

    def __init__(self, with_timestamp: bool = True):
        super().__init__()
        self.with_timestamp = with_timestamp

    def format(self, record):
        log_record = {
            "level": record.levelname,
            "message": record.getMessage(),
            "logger_name": record.name,
            "module": record.module,
            "funcName": record.funcName,
            "lineno": record.lineno,
        }
        if self.with_timestamp:
            log_record["timestamp"] = self.formatTime(record, self.datefmt)
        if hasattr(record, "extra_data"):
            log_record.update(record.extra_data)
        return json.dumps(log_record, default=str)


def setup_logging(
    log_level: str = "WARNING", log_file: Optional[Union[str, Path]] = None
) -> logging.Logger:
    """Configure the ``invot`` logger tree."""
    logger = logging.getLogger("invot")
    logger.setLevel(logging.DEBUG if log_file else getattr(logging, log_level))
    logger.propagate = False

    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(getattr(logging, log_level))
    console_handler.setFormatter(JsonFormatter(with_timestamp=False))
    logger.addHandler(console_handler)

    if log_file is not None:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = RotatingFileHandler(log_path, maxBytes=10 * 1024 * 1024, backupCount=3)
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(JsonFormatter())
        logger.addHandler(file_handler)

    return logger


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """Get a logger instance for the specified name."""
    if name is None:
        name = "invot"
    return logging.getLogger(name)
