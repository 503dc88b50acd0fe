"""Tests for the suite runner on the smoke configuration."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from application.config import SuiteConfig, config_from_dict
from application.report import CheckResult
from application.suites import SUITES, SuiteRunner, TaskOutcome, run_suite, task_rng
from core.errors import IntegrationError, InvalidElementError

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture()
def smoke_data() -> dict:
    return json.loads((FIXTURES / "smoke_config.json").read_text())


@pytest.fixture()
def smoke(smoke_data: dict) -> SuiteConfig:
    return config_from_dict(smoke_data)


def _stable(report) -> list[dict]:
    return [c.to_dict() for c in report.checks]


class TestTaskRng:
    """Per-task generators depend only on the seed and the task name."""

    def test_reproducible(self) -> None:
        assert task_rng(4, "stokes").integers(0, 10**9) == task_rng(4, "stokes").integers(0, 10**9)

    def test_names_are_independent(self) -> None:
        assert task_rng(4, "stokes").integers(0, 10**9) != task_rng(4, "transport").integers(0, 10**9)


class TestCohomologySuite:
    """Curved cohomology tables and their agreement flags."""

    def test_smoke_passes(self, smoke: SuiteConfig) -> None:
        report = run_suite("cohomology", smoke)
        assert report.passed, [c.to_dict() for c in report.failures]
        names = {c.name for c in report.checks}
        assert {"tensor.h0", "tensor.strict_inequality", "matrix.curvature_value", "matrix.nonzero_h1", "scalar.poincare"} <= names
        assert {"tensor", "matrix", "scalar"} <= set(report.tables)
        assert report.check("tensor.flat_dims").passed
        assert "tensor.flat" in report.tables

    def test_flat_side_is_a_full_power(self, smoke: SuiteConfig) -> None:
        report = run_suite("cohomology", smoke)
        flat = {row["degree"]: row["dim_cohomology"] for row in report.tables["tensor.flat"]["degrees"]}
        curved = {row["degree"]: row["dim_cohomology"] for row in report.tables["tensor"]["degrees"]}
        assert flat == {k: 2**k for k in range(smoke.cohomology.tensor_max_degree + 1)}
        assert all(curved[k] < flat[k] for k in flat if k >= 1)

    def test_flat_tensor_skips_strict_inequality(self, smoke_data: dict) -> None:
        smoke_data["cohomology"]["tensor"] = {"dv": 2, "letter": None}
        report = run_suite("cohomology", config_from_dict(smoke_data))
        assert "tensor.strict_inequality" not in {c.name for c in report.checks}
        assert report.check("tensor.h0").passed
        assert report.check("tensor.flat_dims").passed
        assert "tensor.flat" not in report.tables

    def test_worker_count_does_not_change_results(self, smoke: SuiteConfig) -> None:
        serial = run_suite("cohomology", smoke)
        threaded = run_suite("cohomology", smoke.with_overrides(workers=3))
        assert _stable(serial) == _stable(threaded)
        assert serial.tables == threaded.tables


class TestZigzagSuite:
    """Exact identities on the smoke grid and negative controls."""

    def test_smoke_passes(self, smoke: SuiteConfig) -> None:
        report = run_suite("verify-zigzag", smoke)
        assert report.passed, [c.to_dict() for c in report.failures]
        assert report.check("scalar-forms.collapse_chain_map").trials == 2
        assert report.check("tensor.rejects_non_morphism").passed

    @pytest.mark.parametrize("fault", ["c_z_sign", "shuffle_sign"])
    def test_injected_fault_is_caught(self, smoke_data: dict, fault: str) -> None:
        smoke_data["zigzag"].update({"instances": ["tensor"], "inject_fault": fault})
        smoke_data["zigzag"]["trials"]["d_squared"] = 10
        report = run_suite("verify-zigzag", config_from_dict(smoke_data))
        check = report.check("tensor.d_squared")
        assert check.status == "fail"
        assert check.counterexample

    def test_tensor_only_has_no_bar_checks(self, smoke_data: dict) -> None:
        smoke_data["zigzag"]["instances"] = ["tensor"]
        names = [name for name, _ in SuiteRunner(config_from_dict(smoke_data)).tasks("verify-zigzag")]
        assert not any(name.startswith("scalar-forms") for name in names)


class TestPathspaceSuite:
    """Numeric checks at smoke resolution."""

    def test_smoke_passes(self, smoke: SuiteConfig) -> None:
        report = run_suite("verify-pathspace", smoke)
        assert report.passed, [c.to_dict() for c in report.failures]
        assert report.check("stokes").details["exact"] is True
        assert report.check("chain_map").details["c_z_active"] >= 1
        assert all(c.kind == "numeric" for c in report.checks)

    def test_refinement_checks_are_reported(self, smoke_data: dict) -> None:
        smoke_data["pathspace"]["fixtures"]["convergence_gate"] = 1
        report = run_suite("verify-pathspace", config_from_dict(smoke_data))
        for name in ("convergence_gate", "chain_map_refinement", "algebra_map_refinement"):
            check = report.check(name)
            assert check.passed, check.to_dict()
            assert check.trials == 1

    def test_reproducible(self, smoke: SuiteConfig) -> None:
        first = run_suite("verify-pathspace", smoke)
        second = run_suite("verify-pathspace", smoke)
        assert _stable(first) == _stable(second)


class TestRunner:
    """Suite dispatch."""

    def test_unknown_suite(self, smoke: SuiteConfig) -> None:
        with pytest.raises(ValueError, match="unknown suite"):
            SuiteRunner(smoke).tasks("verify-everything")

    def test_every_suite_has_tasks(self, smoke: SuiteConfig) -> None:
        for suite in SUITES:
            assert SuiteRunner(smoke).tasks(suite)

    def test_task_error_becomes_failing_check(self, smoke: SuiteConfig, monkeypatch: pytest.MonkeyPatch) -> None:
        def diverges(rng) -> TaskOutcome:
            raise IntegrationError("transport integration diverged")

        runner = SuiteRunner(smoke)
        monkeypatch.setattr(runner, "tasks", lambda suite: [("transport", diverges)])
        report = runner.run("verify-pathspace")
        assert not report.passed
        check = report.check("transport")
        assert check.status == "fail"
        assert check.counterexample == "IntegrationError: transport integration diverged"
        assert check.details["error"] == "IntegrationError"

    def test_task_error_with_worker_pool(self, smoke: SuiteConfig, monkeypatch: pytest.MonkeyPatch) -> None:
        def bad_input(rng) -> TaskOutcome:
            raise InvalidElementError("the zero tensor has no degree")

        def fine(rng) -> TaskOutcome:
            return TaskOutcome([CheckResult.exact("fine", True)])

        runner = SuiteRunner(smoke.with_overrides(workers=2))
        monkeypatch.setattr(runner, "tasks", lambda suite: [("bad", bad_input), ("fine", fine)])
        report = runner.run("cohomology")
        assert [c.name for c in report.checks] == ["bad", "fine"]
        assert [c.passed for c in report.checks] == [False, True]
