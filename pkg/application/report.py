"""Suite reports and their formatting.

A :class:`Report` collects the :class:`CheckResult` of every check a suite ran,
together with environment metadata and the digest of the frozen sign ledger.
The text format is for terminal display; the JSON format is for machine
consumption and validates against ``standards/report.schema.json``.
"""

from __future__ import annotations

import datetime
import hashlib
import json
import platform
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from core.chen import NumericCheck
from core.curved_dga import AxiomReport

SCHEMA_VERSION = "1.0"

SIGNS_PATH = Path(__file__).resolve().parent.parent / "SIGNS.md"

STATUSES = ("pass", "fail")
KINDS = ("exact", "numeric")


def signs_digest(path: Path = SIGNS_PATH) -> str:
    """SHA-256 of the sign ledger, or ``"unavailable"`` when it is not shipped."""
    try:
        return hashlib.sha256(path.read_bytes()).hexdigest()
    except OSError:
        return "unavailable"


def _package_versions() -> dict[str, str]:
    versions = {}
    for module in ("numpy", "scipy", "sympy", "jsonschema"):
        try:
            versions[module] = str(__import__(module).__version__)
        except (ImportError, AttributeError):
            versions[module] = "unavailable"
    return versions


def environment_metadata() -> dict[str, Any]:
    return {
        "python": platform.python_version(),
        "platform": sys.platform,
        "packages": _package_versions(),
    }


@dataclass
class CheckResult:
    """Outcome of one named check.

    Attributes:
        name: Check identifier, unique within a report.
        status: ``"pass"`` or ``"fail"``.
        kind: ``"exact"`` for rational identities, ``"numeric"`` for tolerance checks.
        trials: Number of samples or fixtures the check ran on.
        max_error: Largest error seen (numeric checks only).
        tolerance: Threshold the error was held to (numeric checks only).
        counterexample: A minimal reproducer for a failing exact check.
        details: Free-form extra data.
    """

    name: str
    status: str
    kind: str
    trials: int = 1
    max_error: float | None = None
    tolerance: float | None = None
    counterexample: str | None = None
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.status not in STATUSES:
            raise ValueError(f"status must be one of {STATUSES}, got {self.status!r}")
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.trials < 0:
            raise ValueError(f"trials must be nonnegative, got {self.trials}")

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    @classmethod
    def exact(cls, name: str, ok: bool, trials: int = 1, counterexample: str | None = None, **details: Any) -> CheckResult:
        return cls(
            name,
            "pass" if ok else "fail",
            "exact",
            trials,
            counterexample=None if ok else counterexample,
            details=dict(details),
        )

    @classmethod
    def from_numeric(cls, name: str, checks: list[NumericCheck], tolerance: float, **details: Any) -> CheckResult:
        """Fold per-fixture numeric checks into one result keeping the worst error."""
        errors = [c.max_error for c in checks]
        worst = max(errors, default=0.0)
        failing = next((c for c in checks if not c.passed), None)
        ok = failing is None
        merged = dict(details)
        if failing is not None:
            merged["failing_fixture"] = failing.to_dict()
        return cls(
            name,
            "pass" if ok else "fail",
            "numeric",
            len(checks),
            max_error=float(worst),
            tolerance=tolerance,
            details=merged,
        )

    @classmethod
    def from_axioms(cls, name: str, report: AxiomReport) -> CheckResult:
        failing = [r for r in report.results if not r.passed]
        counterexample = None
        if failing:
            counterexample = f"{failing[0].name}: {failing[0].counterexample}"
        return cls(
            name,
            "pass" if report.passed else "fail",
            "exact",
            max((r.trials for r in report.results), default=0),
            counterexample=counterexample,
            details={"axioms": {r.name: r.passed for r in report.results}},
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "status": self.status,
            "kind": self.kind,
            "trials": self.trials,
            "max_error": self.max_error,
            "tolerance": self.tolerance,
            "counterexample": self.counterexample,
            "details": self.details,
        }


@dataclass
class Report:
    """The outcome of one suite run."""

    suite: str
    seed: int
    checks: list[CheckResult] = field(default_factory=list)
    tables: dict[str, Any] = field(default_factory=dict)
    environment: dict[str, Any] = field(default_factory=environment_metadata)
    signs_digest: str = field(default_factory=signs_digest)
    generated_at: str = field(
        default_factory=lambda: datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    )
    schema_version: str = SCHEMA_VERSION

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "suite": self.suite,
            "seed": self.seed,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "tables": self.tables,
            "environment": self.environment,
            "signs_digest": self.signs_digest,
            "generated_at": self.generated_at,
        }


# ---------------------------------------------------------------------------
# Formatting
# ---------------------------------------------------------------------------


def _section_header(title: str, char: str = "=") -> str:
    """Create a section header with underline."""
    return f"\n{title}\n{char * len(title)}"


def _indent(text: str, level: int = 2) -> str:
    """Indent a block of text."""
    prefix = " " * level
    return "\n".join(prefix + line for line in text.splitlines())


def _error_column(check: CheckResult) -> str:
    if check.kind == "exact":
        return "exact"
    return f"err {check.max_error:.3e} / tol {check.tolerance:.1e}"


def _format_table(name: str, table: Any) -> list[str]:
    lines = [f"\n  [{name}]"]
    if isinstance(table, dict) and "degrees" in table:
        lines.append(_indent(f"window: {table.get('window')}", 4))
        for row in table["degrees"]:
            lines.append(
                _indent(
                    f"degree {row['degree']}: dim ker {row['dim_kernel']}, "
                    f"dim im {row['dim_image']}, dim H {row['dim_cohomology']}",
                    4,
                )
            )
    else:
        lines.append(_indent(json.dumps(table, sort_keys=True), 4))
    return lines


def format_text_report(report: Report) -> str:
    """Format a Report for terminal display.

    Args:
        report: The suite report.

    Returns:
        A multi-line string with one line per check and failing details below.
    """
    lines: list[str] = []
    title = f"CURVED ZIGZAG REPORT: {report.suite}"
    lines.append(title)
    lines.append("=" * len(title))
    lines.append(f"seed {report.seed}, signs {report.signs_digest[:12]}")

    lines.append(_section_header("\nCHECKS"))
    width = max((len(c.name) for c in report.checks), default=0)
    for c in report.checks:
        mark = "PASS" if c.passed else "FAIL"
        lines.append(f"  [{mark}] {c.name.ljust(width)}  {c.trials:>5} trials  {_error_column(c)}")

    if report.tables:
        lines.append(_section_header("\nTABLES"))
        for name in sorted(report.tables):
            lines.extend(_format_table(name, report.tables[name]))

    if report.failures:
        lines.append(_section_header("\nFAILURES"))
        for c in report.failures:
            lines.append(f"\n  {c.name}")
            if c.counterexample:
                lines.append(_indent(f"counterexample: {c.counterexample}", 4))
            if "failing_fixture" in c.details:
                lines.append(_indent(f"fixture: {json.dumps(c.details['failing_fixture'], sort_keys=True)}", 4))

    passed = sum(c.passed for c in report.checks)
    lines.append("")
    lines.append("-" * 60)
    lines.append(f"{passed}/{len(report.checks)} checks passed.")
    lines.append("")
    return "\n".join(lines)


def format_json_report(report: Report, indent: int = 2) -> str:
    """Format a Report as JSON with sorted keys."""
    return json.dumps(report.to_dict(), indent=indent, sort_keys=True, default=str)


def format_summary(report: Report) -> str:
    passed = sum(c.passed for c in report.checks)
    status = "PASS" if report.passed else "FAIL"
    return f"{report.suite}: {status} ({passed}/{len(report.checks)} checks)"
