"""Verification reports and their text and structured (JSON) renderings."""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from kernel_atomicity import __version__
from kernel_atomicity.utils.errors import ReportFormatError

TOOL_NAME = "kernel-atomicity"
REPORT_VERSION = 1

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"
STATUSES = (PASS, FAIL, SKIPPED)

# Error kinds a report can end with, and the exit status each one forces
PARSE_ERROR = "parse-error"
INVALID_INPUT = "invalid-input"
CAP_EXCEEDED = "cap-exceeded"
SELF_CHECK = "self-check"
EXIT_CODES = {PARSE_ERROR: 2, INVALID_INPUT: 2, CAP_EXCEEDED: 3, SELF_CHECK: 1}

TEXT_FORMAT = "text"
STRUCTURED_FORMAT = "structured"
FORMATS = (TEXT_FORMAT, STRUCTURED_FORMAT)

_STATUS_TAGS = {PASS: "PASS", FAIL: "FAIL", SKIPPED: "SKIP"}


def plain(value: Any) -> Any:
    """Convert witness data to JSON-native values so reports round-trip unchanged."""
    if isinstance(value, bool) or value is None or isinstance(value, (str, int, float)):
        return value
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (frozenset, set)):
        return sorted(plain(v) for v in value)
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    return str(value)


@dataclass(frozen=True)
class Check:
    """One named property and the outcome of checking it."""

    name: str
    statement: str
    status: str
    witness: Dict[str, Any] = field(default_factory=dict)
    reason: str = ""

    def __post_init__(self) -> None:
        if self.status not in STATUSES:
            raise ReportFormatError(f"unknown check status {self.status!r}")
        object.__setattr__(self, "witness", plain(self.witness))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "statement": self.statement,
            "status": self.status,
            "witness": self.witness,
            "reason": self.reason,
        }


@dataclass(frozen=True)
class VerificationReport:
    """Everything one command found out about one spec file."""

    subject: str
    kind: str
    checks: Tuple[Check, ...] = ()
    tool_version: str = __version__
    error: Optional[Dict[str, Any]] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "checks", tuple(self.checks))
        if self.error is not None:
            object.__setattr__(self, "error", plain(self.error))

    def count(self, status: str) -> int:
        return sum(1 for check in self.checks if check.status == status)

    @property
    def summary(self) -> Dict[str, int]:
        return {
            "checks": len(self.checks),
            "passed": self.count(PASS),
            "failed": self.count(FAIL),
            "skipped": self.count(SKIPPED),
        }

    @property
    def passed(self) -> bool:
        return self.error is None and self.count(FAIL) == 0

    @property
    def exit_code(self) -> int:
        if self.error is not None:
            return EXIT_CODES.get(self.error.get("type"), 1)
        return 1 if self.count(FAIL) else 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "report_version": REPORT_VERSION,
            "tool_version": self.tool_version,
            "subject": self.subject,
            "kind": self.kind,
            "checks": [check.to_dict() for check in self.checks],
            "summary": self.summary,
            "error": self.error,
        }


def combined_exit_code(reports: Sequence[VerificationReport]) -> int:
    """Exit status of a multi-spec run: 2 beats 3 beats 1 beats 0."""
    codes = {report.exit_code for report in reports}
    for code in (2, 3, 1):
        if code in codes:
            return code
    return 0


# Text rendering

def _text_value(value: Any) -> str:
    if isinstance(value, str):
        return value
    return json.dumps(value, separators=(",", ":"), sort_keys=True)


def _text_witness(witness: Dict[str, Any]) -> str:
    return ", ".join(f"{key}={_text_value(witness[key])}" for key in sorted(witness))


def _text_lines(report: VerificationReport) -> List[str]:
    lines = [
        f"{TOOL_NAME} report v{REPORT_VERSION}",
        f"subject: {report.subject} ({report.kind})",
        f"tool: {TOOL_NAME} {report.tool_version}",
    ]
    for check in report.checks:
        lines.append(f"{_STATUS_TAGS[check.status]} {check.name}: {check.statement}")
        if check.witness:
            lines.append(f"  witness: {_text_witness(check.witness)}")
        if check.reason:
            lines.append(f"  reason: {check.reason}")
    if report.error is not None:
        lines.append(f"error: {report.error.get('type')}: {report.error.get('message')}")
        if report.error.get("witness"):
            lines.append(f"  witness: {_text_witness(report.error['witness'])}")
    s = report.summary
    lines.append(f"summary: {s['checks']} checks, {s['passed']} passed, {s['failed']} failed, {s['skipped']} skipped")
    return lines


def emit(report: VerificationReport, fmt: str = TEXT_FORMAT) -> str:
    """Render a report; both formats are deterministic for identical reports."""
    if fmt == STRUCTURED_FORMAT:
        return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    if fmt != TEXT_FORMAT:
        raise ReportFormatError(f"unknown report format {fmt!r}")
    return "\n".join(_text_lines(report)) + "\n"


def emit_bundle(reports: Sequence[VerificationReport], fmt: str = TEXT_FORMAT) -> str:
    """Render several reports, in the given order, as one document."""
    if fmt == STRUCTURED_FORMAT:
        document = {
            "report_version": REPORT_VERSION,
            "tool_version": __version__,
            "reports": [report.to_dict() for report in reports],
        }
        return json.dumps(document, indent=2, sort_keys=True) + "\n"
    return "\n".join(emit(report, fmt) for report in reports)


# Structured parsing

def _report_from_dict(data: Any) -> VerificationReport:
    if not isinstance(data, dict):
        raise ReportFormatError("report must be a JSON object")
    if data.get("report_version") != REPORT_VERSION:
        raise ReportFormatError(f"unsupported report_version {data.get('report_version')!r}")
    try:
        checks = tuple(
            Check(
                name=item["name"],
                statement=item["statement"],
                status=item["status"],
                witness=item.get("witness", {}),
                reason=item.get("reason", ""),
            )
            for item in data["checks"]
        )
        report = VerificationReport(
            subject=data["subject"],
            kind=data["kind"],
            checks=checks,
            tool_version=data["tool_version"],
            error=data.get("error"),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ReportFormatError(f"malformed report: {e}")
    if "summary" in data and data["summary"] != report.summary:
        raise ReportFormatError("summary does not match the checks", {"summary": data["summary"]})
    return report


def parse_report(document: str) -> VerificationReport:
    """Read back a report written by ``emit(..., "structured")``.

    Raises:
        ReportFormatError: If the document is not a version-1 report
    """
    try:
        data = json.loads(document)
    except json.JSONDecodeError as e:
        raise ReportFormatError(f"not JSON: {e.msg}", {"line": e.lineno})
    return _report_from_dict(data)


def parse_bundle(document: str) -> List[VerificationReport]:
    """Read back a multi-report document written by ``emit_bundle``."""
    try:
        data = json.loads(document)
    except json.JSONDecodeError as e:
        raise ReportFormatError(f"not JSON: {e.msg}", {"line": e.lineno})
    if not isinstance(data, dict) or data.get("report_version") != REPORT_VERSION:
        raise ReportFormatError("not a version-1 report bundle")
    return [_report_from_dict(item) for item in data.get("reports", [])]
