"""Persistence layer for verification reports."""

import json
import logging
import os
from pathlib import Path
from typing import Optional

from .report import VerificationReport


logger = logging.getLogger(__name__)

REPORTS_DIR = Path(os.environ.get("HECKE_REPORTS_DIR", Path.home() / ".hecke-product" / "reports")).expanduser()


def ensure_reports_dir() -> Path:
    """Ensure the reports directory exists."""
    REPORTS_DIR.mkdir(parents=True, exist_ok=True)
    return REPORTS_DIR


def save_report(report: VerificationReport) -> Path:
    """Save a report to JSON file.

    Args:
        report: The report to save

    Returns:
        Path to the saved file
    """
    dir_path = ensure_reports_dir()
    file_path = dir_path / f"{report.id}.json"

    with open(file_path, 'w', encoding='utf-8') as f:
        json.dump(report.to_dict(), f, indent=2, sort_keys=True)

    logger.info("Saved report %s", file_path)
    return file_path


def _read(file_path: Path) -> VerificationReport:
    with open(file_path, 'r', encoding='utf-8') as f:
        return VerificationReport.from_dict(json.load(f))


def list_reports(limit: int = 50, scenario: Optional[str] = None) -> list[VerificationReport]:
    """List saved reports, newest first.

    Args:
        limit: Maximum number of results to return
        scenario: Only reports for this scenario

    Returns:
        List of reports sorted by created_at descending
    """
    if not REPORTS_DIR.exists():
        return []

    reports = []
    for file_path in REPORTS_DIR.glob("*.json"):
        try:
            report = _read(file_path)
        except (json.JSONDecodeError, TypeError, KeyError):
            continue  # Skip invalid files
        if scenario is None or report.scenario == scenario:
            reports.append(report)

    reports.sort(key=lambda r: r.created_at, reverse=True)
    return reports[:limit]


def _find(report_id: str) -> Optional[Path]:
    if not REPORTS_DIR.exists() or not report_id:
        return None
    exact_path = REPORTS_DIR / f"{report_id}.json"
    if exact_path.exists():
        return exact_path
    for file_path in sorted(REPORTS_DIR.glob("*.json")):
        if file_path.stem.startswith(report_id):
            return file_path
    return None


def load_report(report_id: str) -> Optional[VerificationReport]:
    """Load a report by ID (supports partial ID matching)."""
    file_path = _find(report_id)
    return _read(file_path) if file_path else None


def delete_report(report_id: str) -> bool:
    """Delete a report by ID.

    Returns:
        True if deleted, False if not found
    """
    file_path = _find(report_id)
    if file_path is None:
        return False
    file_path.unlink()
    return True
