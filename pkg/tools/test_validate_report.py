#!/usr/bin/env python3
"""
Tests for validate_report.py - the suite report validator.

Run with: python -m pytest tools/test_validate_report.py -v
"""

import json
import subprocess
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
SCHEMA_PATH = str(ROOT / "standards" / "report.schema.json")
VALIDATOR_PATH = str(ROOT / "tools" / "validate_report.py")


def run_validator(*paths: Path, schema_path: str = SCHEMA_PATH) -> tuple[int, str, str]:
    """
    Run the validator on report files.

    Returns:
        (return_code, stdout, stderr)
    """
    result = subprocess.run(
        [sys.executable, VALIDATOR_PATH, "--schema", schema_path, *map(str, paths)],
        capture_output=True,
        text=True,
    )
    return result.returncode, result.stdout, result.stderr


@pytest.fixture()
def report() -> dict:
    return {
        "schema_version": "1.0",
        "suite": "verify-pathspace",
        "seed": 0,
        "passed": True,
        "checks": [
            {
                "name": "stokes",
                "status": "pass",
                "kind": "numeric",
                "trials": 2,
                "max_error": 0.0,
                "tolerance": 1e-8,
                "counterexample": None,
                "details": {"exact": True},
            }
        ],
        "tables": {},
        "environment": {"python": "3.11.4", "platform": "linux", "packages": {"numpy": "1.26.0"}},
        "signs_digest": "unavailable",
        "generated_at": "2026-01-01T00:00:00+00:00",
    }


def write(tmp_path: Path, name: str, data: dict) -> Path:
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


class TestValidReports:
    """Reports the suites emit."""

    def test_valid_report(self, tmp_path, report):
        returncode, stdout, _ = run_validator(write(tmp_path, "ok.json", report))
        assert returncode == 0, f"Validator failed: {stdout}"
        assert "✅" in stdout

    def test_exact_check_without_error_fields(self, tmp_path, report):
        report["checks"] = [{"name": "tensor.h0", "status": "pass", "kind": "exact", "trials": 1}]
        returncode, stdout, _ = run_validator(write(tmp_path, "exact.json", report))
        assert returncode == 0, f"Validator failed: {stdout}"


class TestInvalidReports:
    """Structural violations."""

    def test_missing_required_field(self, tmp_path, report):
        del report["signs_digest"]
        returncode, stdout, _ = run_validator(write(tmp_path, "missing.json", report))
        assert returncode == 1
        assert "❌" in stdout
        assert "signs_digest" in stdout

    def test_numeric_check_needs_tolerance(self, tmp_path, report):
        del report["checks"][0]["tolerance"]
        returncode, stdout, _ = run_validator(write(tmp_path, "numeric.json", report))
        assert returncode == 1
        assert "checks.0" in stdout

    def test_unknown_status(self, tmp_path, report):
        report["checks"][0]["status"] = "skipped"
        returncode, _, _ = run_validator(write(tmp_path, "status.json", report))
        assert returncode == 1

    def test_bad_digest(self, tmp_path, report):
        report["signs_digest"] = "abc"
        returncode, _, _ = run_validator(write(tmp_path, "digest.json", report))
        assert returncode == 1

    def test_unreadable_file(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{")
        returncode, stdout, _ = run_validator(path)
        assert returncode == 1
        assert "error reading file" in stdout

    def test_one_bad_file_fails_the_batch(self, tmp_path, report):
        good = write(tmp_path, "good.json", report)
        bad = write(tmp_path, "bad.json", {**report, "suite": "verify-everything"})
        returncode, stdout, _ = run_validator(good, bad)
        assert returncode == 1
        assert "✅" in stdout and "❌" in stdout

    def test_missing_schema(self, tmp_path, report):
        returncode, stdout, _ = run_validator(write(tmp_path, "ok.json", report), schema_path=str(tmp_path / "none.json"))
        assert returncode == 1
        assert "Error reading schema file" in stdout


class TestConsistency:
    """Cross-field rules checked after the schema passes."""

    def test_passed_flag_must_match_statuses(self, tmp_path, report):
        report["checks"][0]["status"] = "fail"
        returncode, stdout, _ = run_validator(write(tmp_path, "flag.json", report))
        assert returncode == 1
        assert "disagrees with the check statuses" in stdout

    def test_pass_above_tolerance(self, tmp_path, report):
        report["checks"][0]["max_error"] = 1e-3
        returncode, stdout, _ = run_validator(write(tmp_path, "error.json", report))
        assert returncode == 1
        assert "above tolerance" in stdout

    def test_fail_within_tolerance_is_allowed(self, tmp_path, report):
        report["checks"][0]["status"] = "fail"
        report["passed"] = False
        returncode, stdout, _ = run_validator(write(tmp_path, "inactive.json", report))
        assert returncode == 0, f"Validator failed: {stdout}"

    def test_numeric_check_with_null_error(self, tmp_path, report):
        report["checks"][0]["max_error"] = None
        returncode, _, _ = run_validator(write(tmp_path, "null.json", report))
        assert returncode == 1
