"""Verification suites and report serialization."""

from .reporting import render_report, write_report
from .suites import SUITES, run_all, run_suite

__all__ = [
    "SUITES",
    "run_all",
    "run_suite",
    "render_report",
    "write_report",
]
