"""Verification reports and their JSON, text and CSV renderings."""

import csv
import hashlib
import io
import json
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime
from typing import Any, Optional

import numpy as np


SCHEMA_VERSION = 1

# Fields left out of the deterministic id and of the comparable JSON form.
TIMING_FIELDS = ("wall_time", "created_at")

CSV_FIELDS = [
    "identity", "scenario", "u", "v", "k", "x", "gamma",
    "lhs_re", "lhs_im", "rhs_re", "rhs_im",
    "abs_residual", "rel_residual", "tolerance", "passed", "status", "wall_time",
]


def relative_residual(lhs: complex, rhs: complex) -> float:
    """|lhs - rhs| / max(|lhs|, |rhs|), or 0 when both vanish."""
    scale = max(abs(lhs), abs(rhs))
    if scale == 0.0:
        return 0.0
    return abs(lhs - rhs) / scale


def encode(value: Any) -> Any:
    """JSON-safe form: complex numbers become {"re": ..., "im": ...}."""
    if isinstance(value, dict):
        return {str(k): encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode(v) for v in value]
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(value.real), "im": float(value.imag)}
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if hasattr(value, "value") and hasattr(value, "name"):    # enums
        return value.value
    return value


def decode(value: Any) -> Any:
    """Inverse of encode for complex mappings."""
    if isinstance(value, dict):
        if set(value) == {"re", "im"}:
            return complex(value["re"], value["im"])
        return {k: decode(v) for k, v in value.items()}
    if isinstance(value, list):
        return [decode(v) for v in value]
    return value


def _is_finite(value: Any) -> bool:
    if isinstance(value, complex):
        return math.isfinite(value.real) and math.isfinite(value.imag)
    if isinstance(value, float):
        return math.isfinite(value)
    return True


@dataclass
class VerificationReport:
    """Outcome of one identity check."""
    id: str                              # content hash, timing fields excluded
    identity: str
    scenario: str
    parameters: dict                     # u, v, k, gamma, x, right, h
    lhs: Optional[complex]
    rhs: Optional[complex]
    abs_residual: Optional[float]
    rel_residual: Optional[float]
    tolerance: float
    passed: bool
    terms: dict = field(default_factory=dict)       # per-term breakdown
    settings: dict = field(default_factory=dict)    # truncation and quadrature echo
    wall_time: float = 0.0
    error: Optional[str] = None
    error_kind: Optional[str] = None     # certification, precision, convergence, evaluation, numerical
    created_at: str = ""
    schema: int = SCHEMA_VERSION

    @classmethod
    def create(
        cls,
        identity: str,
        scenario: str,
        parameters: dict,
        lhs: Optional[complex],
        rhs: Optional[complex],
        tolerance: float,
        terms: Optional[dict] = None,
        settings: Optional[dict] = None,
        wall_time: float = 0.0,
        error: Optional[str] = None,
        error_kind: Optional[str] = None,
    ) -> "VerificationReport":
        """Build a report, computing residuals, the pass flag and the id."""
        abs_res = rel_res = None
        if lhs is not None and rhs is not None:
            if not (_is_finite(complex(lhs)) and _is_finite(complex(rhs))):
                error = error or "non-finite value"
                error_kind = error_kind or "evaluation"
            else:
                abs_res = abs(lhs - rhs)
                rel_res = relative_residual(lhs, rhs)
        passed = error is None and rel_res is not None and rel_res <= tolerance
        report = cls(
            id="",
            identity=identity,
            scenario=scenario,
            parameters=dict(parameters),
            lhs=lhs if abs_res is not None else None,
            rhs=rhs if abs_res is not None else None,
            abs_residual=abs_res,
            rel_residual=rel_res,
            tolerance=tolerance,
            passed=passed,
            terms={k: v for k, v in (terms or {}).items() if _is_finite(v)},
            settings=dict(settings or {}),
            wall_time=wall_time,
            error=error,
            error_kind=error_kind,
            created_at=datetime.now().isoformat(),
        )
        report.id = report.fingerprint()
        return report

    @property
    def status(self) -> str:
        if self.error:
            return f"error: {self.error_kind}"
        return "pass" if self.passed else "fail"

    def to_dict(self, timing: bool = True) -> dict:
        data = encode(asdict(self))
        if not timing:
            for name in TIMING_FIELDS:
                data.pop(name, None)
        return data

    def fingerprint(self) -> str:
        body = self.to_dict(timing=False)
        body.pop("id", None)
        digest = hashlib.sha256(json.dumps(body, sort_keys=True).encode("utf-8")).hexdigest()
        return digest[:32]

    @classmethod
    def from_dict(cls, data: dict) -> "VerificationReport":
        return cls(**decode(data))


def to_json(reports: list[VerificationReport], timing: bool = True) -> str:
    """Stable JSON document: sorted keys, two-space indent."""
    payload = {"schema": SCHEMA_VERSION, "reports": [r.to_dict(timing) for r in reports]}
    return json.dumps(payload, indent=2, sort_keys=True)


def _fmt(value: Optional[complex]) -> str:
    if value is None:
        return "-"
    value = complex(value)
    return f"{value.real:+.12e} {value.imag:+.3e}i"


def to_text(reports: list[VerificationReport]) -> str:
    """Aligned plain-text form, one block per report."""
    lines = []
    for r in reports:
        lines.append(f"{r.identity} on {r.scenario}  [{r.status}]  id {r.id[:8]}")
        p = r.parameters
        lines.append(f"  {'params':<14} u={_fmt(p.get('u'))}  v={_fmt(p.get('v'))}  "
                     f"k={p.get('k')}  x={p.get('x')}  gamma={p.get('gamma')}")
        lines.append(f"  {'lhs':<14} {_fmt(r.lhs)}")
        lines.append(f"  {'rhs':<14} {_fmt(r.rhs)}")
        if r.rel_residual is not None:
            lines.append(f"  {'abs residual':<14} {r.abs_residual:.3e}")
            lines.append(f"  {'rel residual':<14} {r.rel_residual:.3e}  (tol {r.tolerance:.1e})")
        if r.error:
            lines.append(f"  {'error':<14} {r.error}")
        for name, value in r.terms.items():
            shown = _fmt(value) if isinstance(value, complex) else f"{value:.6e}"
            lines.append(f"  {name:<14} {shown}")
        lines.append(f"  {'wall time':<14} {r.wall_time:.2f}s")
        lines.append("")
    return "\n".join(lines)


def csv_row(report: Optional[VerificationReport], identity: str = "", scenario: str = "",
            parameters: Optional[dict] = None, status: Optional[str] = None) -> dict:
    """One CSV row; rows without a report carry only parameters and status."""
    p = (report.parameters if report else parameters) or {}
    u, v = complex(p.get("u", 0)), complex(p.get("v", 0))
    row = {name: "" for name in CSV_FIELDS}
    row.update(identity=report.identity if report else identity,
               scenario=report.scenario if report else scenario,
               u=f"{u.real:g}{u.imag:+g}i", v=f"{v.real:g}{v.imag:+g}i",
               k=p.get("k", ""), x=p.get("x", ""), gamma=p.get("gamma", ""))
    if report is None:
        row["status"] = status or ""
        return row
    if report.lhs is not None:
        row.update(lhs_re=repr(report.lhs.real), lhs_im=repr(report.lhs.imag),
                   rhs_re=repr(report.rhs.real), rhs_im=repr(report.rhs.imag),
                   abs_residual=f"{report.abs_residual:.6e}",
                   rel_residual=f"{report.rel_residual:.6e}")
    row.update(tolerance=report.tolerance, passed=report.passed,
               status=status or report.status, wall_time=f"{report.wall_time:.3f}")
    return row


def to_csv(rows: list[dict]) -> str:
    """CSV document with a header row, even when rows is empty."""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()
