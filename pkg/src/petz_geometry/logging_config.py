"""Structured logging configuration for petz-geometry."""

import logging
import sys
import uuid
from contextvars import ContextVar
from typing import TextIO

from .config import config

# Context variable carrying the id of the current suite run or HTTP request
run_id_var: ContextVar[str | None] = ContextVar("run_id", default=None)


class RunIdFilter(logging.Filter):
    """Add run_id to log records."""

    def filter(self, record: logging.LogRecord) -> bool:
        record.run_id = run_id_var.get() or "no-run-id"
        return True


def setup_logging(stream: TextIO | None = None, level: str | None = None) -> None:
    """
    Configure structured logging.

    Args:
        stream: Destination of log records. The CLI passes stderr so that reports
            written to stdout stay machine-readable; defaults to stdout.
        level: Overrides the configured LOG_LEVEL.

    Note: This should only be called once at startup.
    If logging is already configured, this function will reconfigure it.
    """
    log_format = (
        "%(asctime)s | %(levelname)-8s | %(run_id)s | "
        "%(name)s:%(funcName)s:%(lineno)d | %(message)s"
    )

    formatter = logging.Formatter(log_format)
    root_logger = logging.getLogger()

    if not root_logger.handlers or root_logger.level == logging.NOTSET or stream is not None:
        root_logger.setLevel(getattr(logging, level or config.LOG_LEVEL, logging.INFO))

        # Remove existing handlers to avoid duplicates
        root_logger.handlers.clear()

        console_handler = logging.StreamHandler(stream or sys.stdout)
        console_handler.setFormatter(formatter)
        console_handler.addFilter(RunIdFilter())
        root_logger.addHandler(console_handler)

        # Reduce noise from third-party libraries
        logging.getLogger("uvicorn.access").setLevel(logging.WARNING)
        logging.getLogger("httpx").setLevel(logging.WARNING)
        logging.getLogger("httpcore").setLevel(logging.WARNING)


def set_run_id(run_id: str | None = None) -> str:
    """Set run_id in context and return it."""
    if run_id is None:
        run_id = uuid.uuid4().hex[:12]
    run_id_var.set(run_id)
    return run_id


def get_logger(name: str) -> logging.Logger:
    """Get a logger instance."""
    return logging.getLogger(name)
