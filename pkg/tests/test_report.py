"""Tests for core/report.py - residuals, report construction and renderings."""

import csv
import io
import json

import pytest

from core.report import (
    CSV_FIELDS,
    SCHEMA_VERSION,
    VerificationReport,
    csv_row,
    decode,
    encode,
    relative_residual,
    to_csv,
    to_json,
    to_text,
)


def make_report(lhs=1.0 + 0j, rhs=1.0 + 1e-7j, **kwargs) -> VerificationReport:
    values = dict(
        identity="id2",
        scenario="zeta",
        parameters={"u": 2.2 + 0j, "v": 2.3 + 0j, "k": 3, "gamma": 1.5, "x": 1.0, "right": 3.15, "h": None},
        lhs=lhs,
        rhs=rhs,
        tolerance=1e-5,
        terms={"p_k": 0.25 + 0.5j},
        settings={"sum_tol": 1e-12},
        wall_time=0.5,
    )
    values.update(kwargs)
    return VerificationReport.create(**values)


class TestRelativeResidual:
    """Tests for relative_residual."""

    def test_both_zero(self):
        """0 against 0 is an exact match."""
        assert relative_residual(0j, 0j) == 0.0

    def test_scaled_by_larger_side(self):
        """The denominator is the larger modulus."""
        assert relative_residual(1.0, 2.0) == pytest.approx(0.5)
        assert relative_residual(2.0, 1.0) == pytest.approx(0.5)


class TestVerificationReport:
    """Tests for VerificationReport.create."""

    def test_pass_and_residuals(self):
        """Residuals are filled in and compared with the tolerance."""
        report = make_report()
        assert report.passed
        assert report.abs_residual == pytest.approx(1e-7)
        assert report.rel_residual == pytest.approx(1e-7, rel=1e-6)
        assert report.status == "pass"

    def test_fail(self):
        """A residual above the tolerance fails."""
        report = make_report(rhs=1.1 + 0j)
        assert not report.passed
        assert report.status == "fail"

    def test_error_report(self):
        """Errors leave residuals empty and never pass."""
        report = make_report(lhs=None, rhs=None, error="QuadratureError: boom", error_kind="certification")
        assert not report.passed
        assert report.rel_residual is None
        assert report.status == "error: certification"

    def test_non_finite_becomes_error(self):
        """NaN or infinite sides are reported as an evaluation error."""
        report = make_report(lhs=complex(float("nan"), 0.0))
        assert not report.passed
        assert report.error_kind == "evaluation"
        assert report.lhs is None

    def test_id_ignores_timing(self):
        """The id is a content hash without wall time or creation time."""
        a = make_report(wall_time=0.1)
        b = make_report(wall_time=9.0)
        assert a.id == b.id
        assert len(a.id) == 32

    def test_id_tracks_content(self):
        """Different parameters give different ids."""
        assert make_report().id != make_report(rhs=1.0 + 2e-7j).id

    def test_dict_round_trip(self):
        """to_dict / from_dict preserve complex values."""
        report = make_report()
        restored = VerificationReport.from_dict(json.loads(json.dumps(report.to_dict())))
        assert restored.lhs == report.lhs
        assert restored.terms["p_k"] == 0.25 + 0.5j
        assert restored.parameters["u"] == 2.2 + 0j


class TestEncoding:
    """Tests for encode and decode."""

    def test_complex(self):
        """Complex numbers become re/im mappings."""
        assert encode(1 + 2j) == {"re": 1.0, "im": 2.0}
        assert decode({"re": 1.0, "im": 2.0}) == 1 + 2j

    def test_numpy_scalars(self):
        """numpy scalars become plain Python numbers."""
        import numpy as np
        assert type(encode(np.float64(1.5))) is float
        assert type(encode(np.int64(3))) is int
        assert encode(np.complex128(1j)) == {"re": 0.0, "im": 1.0}


class TestRenderings:
    """Tests for JSON, text and CSV output."""

    def test_json_is_stable(self):
        """Without timing, equal reports serialise identically."""
        a = to_json([make_report(wall_time=0.1)], timing=False)
        b = to_json([make_report(wall_time=2.0)], timing=False)
        assert a == b
        data = json.loads(a)
        assert data["schema"] == SCHEMA_VERSION
        assert "wall_time" not in data["reports"][0]

    def test_text(self):
        """The text form shows both sides and the residual."""
        text = to_text([make_report()])
        assert "id2 on zeta  [pass]" in text
        assert "rel residual" in text
        assert "p_k" in text

    def test_text_error(self):
        """Errors are shown instead of residuals."""
        text = to_text([make_report(lhs=None, rhs=None, error="boom", error_kind="evaluation")])
        assert "error" in text and "boom" in text
        assert "rel residual" not in text

    def test_csv_header_without_rows(self):
        """An empty sweep still has a header."""
        assert to_csv([]).strip() == ",".join(CSV_FIELDS)

    def test_csv_rows(self):
        """Report rows and skipped rows share the columns."""
        skipped = csv_row(None, "id2", "zeta", {"u": 0.4, "v": 2.3, "k": 3, "x": 1.0, "gamma": 1.5},
                          status="skipped: hypothesis")
        rows = list(csv.DictReader(io.StringIO(to_csv([csv_row(make_report()), skipped]))))
        assert rows[0]["status"] == "pass"
        assert rows[0]["u"] == "2.2+0i"
        assert rows[1]["status"] == "skipped: hypothesis"
        assert rows[1]["lhs_re"] == ""
