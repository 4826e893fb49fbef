"""Serialization of suite reports as JSON or CSV."""

import csv
import io
import json
from pathlib import Path
from typing import TextIO

from ..api.schemas import SuiteReport
from ..logging_config import get_logger

logger = get_logger(__name__)

CSV_COLUMNS = (
    "suite",
    "check",
    "n",
    "kappa",
    "spec",
    "trials",
    "max_abs_residual",
    "tolerance",
    "violations",
    "skipped",
    "passed",
)


def report_to_json(report: SuiteReport) -> str:
    """Sorted-key JSON; wall time is omitted unless it was recorded."""
    payload = report.model_dump(mode="json")
    if payload.get("wall_time_s") is None:
        payload.pop("wall_time_s", None)
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def report_to_csv(report: SuiteReport) -> str:
    """One row per cell."""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for cell in report.cells:
        row = cell.model_dump(mode="json", include=set(CSV_COLUMNS))
        row["kappa"] = "" if cell.kappa is None else f"{cell.kappa:g}"
        row["spec"] = cell.spec or ""
        row["max_abs_residual"] = f"{cell.max_abs_residual:.6e}"
        row["tolerance"] = f"{cell.tolerance:.1e}"
        row["passed"] = "true" if cell.passed else "false"
        writer.writerow(row)
    return buffer.getvalue()


def render_report(report: SuiteReport, fmt: str = "json") -> str:
    if fmt == "json":
        return report_to_json(report)
    if fmt == "csv":
        return report_to_csv(report)
    raise ValueError(f"Unknown report format {fmt!r}; expected 'json' or 'csv'")


def write_report(report: SuiteReport, fmt: str = "json", out: str | None = None, stream: TextIO | None = None) -> None:
    """
    Write a rendered report to ``out``, or to ``stream`` when no path is given.

    Args:
        report: suite outcome
        fmt: "json" or "csv"
        out: destination file; parent directories are created
        stream: fallback text stream, normally standard output
    """
    text = render_report(report, fmt)
    if out is None:
        if stream is None:
            raise ValueError("Either a path or a stream is required")
        stream.write(text)
        stream.flush()
        return

    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info(f"Report for {report.suite} written to {path} ({len(report.cells)} cells)")
