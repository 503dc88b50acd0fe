#!/usr/bin/env python3
"""Validate saved suite reports against the report schema."""

from __future__ import annotations

import argparse
import json
import sys

from jsonschema import Draft202012Validator

DEFAULT_SCHEMA = "standards/report.schema.json"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Validate curved-zigzag report files")
    parser.add_argument("--schema", default=DEFAULT_SCHEMA, help="Path to the JSON schema file")
    parser.add_argument("files", nargs="+", help="Report files to validate")
    return parser


def consistency_problems(data: dict) -> list[str]:
    """Cross-field rules the schema cannot express."""
    problems = []
    checks = data.get("checks", [])
    if data.get("passed") != all(c.get("status") == "pass" for c in checks):
        problems.append("passed: disagrees with the check statuses")
    for i, check in enumerate(checks):
        if check.get("kind") != "numeric":
            continue
        if check["status"] == "pass" and not check["max_error"] <= check["tolerance"]:
            problems.append(f"checks.{i}: passes with error {check['max_error']} above tolerance {check['tolerance']}")
    return problems


def validate_files(schema_path: str, files: list[str]) -> bool:
    try:
        with open(schema_path) as f:
            schema = json.load(f)
    except Exception as e:
        print(f"Error reading schema file {schema_path}: {e}")
        sys.exit(1)

    validator = Draft202012Validator(schema)

    ok = True
    for path in files:
        try:
            with open(path) as f:
                data = json.load(f)
        except Exception as e:
            print(f"❌ {path}")
            print(f"  - error reading file: {e}")
            ok = False
            continue
        errors = sorted(validator.iter_errors(data), key=lambda e: list(map(str, e.path)))
        problems = [f"{'.'.join(str(p) for p in err.path) or '(root)'}: {err.message}" for err in errors]
        if not problems:
            problems = consistency_problems(data)
        if problems:
            ok = False
            print(f"❌ {path}")
            for problem in problems:
                print(f"  - {problem}")
        else:
            print(f"✅ {path}")
    return ok


def main() -> None:
    args = build_parser().parse_args()
    if not validate_files(args.schema, args.files):
        sys.exit(1)


if __name__ == "__main__":
    main()
