"""Tests for core/persistence.py - report storage."""

import json
from unittest.mock import patch

import pytest

from core.persistence import (
    delete_report,
    list_reports,
    load_report,
    save_report,
)
from core.report import VerificationReport


@pytest.fixture
def temp_reports_dir(tmp_path):
    """Create a temporary reports directory."""
    reports_dir = tmp_path / "reports"
    reports_dir.mkdir()
    with patch("core.persistence.REPORTS_DIR", reports_dir):
        yield reports_dir


def make_report(scenario="zeta", rhs=1.0 + 0j, created_at=None) -> VerificationReport:
    report = VerificationReport.create(
        identity="s2",
        scenario=scenario,
        parameters={"u": 2.2 + 0j, "v": 2.3 + 0j, "k": 3, "gamma": 1.5, "x": 1.0},
        lhs=1.0 + 0j,
        rhs=rhs,
        tolerance=1e-6,
    )
    if created_at:
        report.created_at = created_at
    return report


class TestSaveAndLoad:
    """Tests for save_report and load_report."""

    def test_save_creates_json_file(self, temp_reports_dir):
        """save_report should create a JSON file named by the id."""
        report = make_report()
        path = save_report(report)

        assert path.exists()
        assert path.name == f"{report.id}.json"
        data = json.loads(path.read_text())
        assert data["identity"] == "s2"
        assert data["lhs"] == {"re": 1.0, "im": 0.0}

    def test_load_by_full_id(self, temp_reports_dir):
        """load_report should find a report by its full ID."""
        report = make_report()
        save_report(report)

        loaded = load_report(report.id)

        assert loaded is not None
        assert loaded.id == report.id
        assert loaded.rhs == report.rhs

    def test_load_by_partial_id(self, temp_reports_dir):
        """load_report should support prefix matching."""
        report = make_report()
        save_report(report)

        loaded = load_report(report.id[:8])

        assert loaded is not None
        assert loaded.id == report.id

    def test_load_nonexistent(self, temp_reports_dir):
        """load_report should return None for unknown IDs."""
        assert load_report("nonexistent-id") is None

    def test_same_content_overwrites(self, temp_reports_dir):
        """Identical runs share an id and one file."""
        save_report(make_report())
        save_report(make_report())

        assert len(list(temp_reports_dir.glob("*.json"))) == 1


class TestListReports:
    """Tests for list_reports."""

    def test_empty_directory(self, temp_reports_dir):
        """list_reports should return an empty list when nothing is saved."""
        assert list_reports() == []

    def test_sorted_newest_first(self, temp_reports_dir):
        """Reports come back by created_at descending."""
        old = make_report(rhs=1.0 + 1e-9j, created_at="2026-01-01T00:00:00")
        new = make_report(rhs=1.0 + 2e-9j, created_at="2026-02-01T00:00:00")
        save_report(old)
        save_report(new)

        reports = list_reports()

        assert [r.id for r in reports] == [new.id, old.id]

    def test_limit_and_scenario_filter(self, temp_reports_dir):
        """limit caps the result and scenario filters it."""
        save_report(make_report("zeta", rhs=1.0 + 1e-9j))
        save_report(make_report("zeta", rhs=1.0 + 2e-9j))
        save_report(make_report("tau"))

        assert len(list_reports(limit=2)) == 2
        assert [r.scenario for r in list_reports(scenario="tau")] == ["tau"]

    def test_skips_invalid_files(self, temp_reports_dir):
        """Corrupt JSON files are ignored."""
        (temp_reports_dir / "broken.json").write_text("{not json")
        save_report(make_report())

        assert len(list_reports()) == 1

    def test_missing_directory(self, tmp_path):
        """A missing directory means no reports."""
        with patch("core.persistence.REPORTS_DIR", tmp_path / "absent"):
            assert list_reports() == []


class TestDeleteReport:
    """Tests for delete_report."""

    def test_delete_existing(self, temp_reports_dir):
        """delete_report should remove the file and return True."""
        report = make_report()
        path = save_report(report)

        assert delete_report(report.id[:6]) is True
        assert not path.exists()

    def test_delete_nonexistent(self, temp_reports_dir):
        """delete_report should return False for unknown IDs."""
        assert delete_report("nonexistent-id") is False
