"""Tests for suite configuration loading and validation."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from application.config import SuiteConfig, config_from_dict, load_config
from core.errors import ConfigError

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture()
def smoke_data() -> dict:
    return json.loads((FIXTURES / "smoke_config.json").read_text())


class TestDefaults:
    """Defaults are the acceptance-level settings."""

    def test_default_is_valid(self) -> None:
        config = SuiteConfig.default()
        config.validate()
        assert config.zigzag.trials["axioms"] == 200
        assert config.pathspace.tolerances["stokes"] == 1e-8
        assert config.zigzag.matrix.connection == "example"

    def test_load_none_gives_defaults(self) -> None:
        assert load_config(None) == SuiteConfig.default()

    def test_to_dict_round_trips(self) -> None:
        config = SuiteConfig.default()
        assert config_from_dict(config.to_dict()) == config

    def test_shipped_default_file_matches_defaults(self) -> None:
        config = load_config(FIXTURES / "default_config.json")
        assert config.zigzag == SuiteConfig.default().zigzag
        assert config.pathspace == SuiteConfig.default().pathspace


class TestPartialFiles:
    """Missing keys fall back to the defaults."""

    def test_smoke_config_merges_tolerances(self, smoke_data: dict) -> None:
        config = config_from_dict(smoke_data)
        assert config.seed == 1
        assert config.pathspace.tolerances["transport"] == 1e-5
        assert config.pathspace.tolerances["boundary_term"] == 1e-8
        assert config.zigzag.rows == (2,)
        assert config.zigzag.instances == ("matrix-form", "tensor")

    def test_overrides(self, smoke_data: dict) -> None:
        config = config_from_dict(smoke_data).with_overrides(seed=9, workers=3, output="out.json")
        assert (config.seed, config.workers, config.output) == (9, 3, "out.json")
        assert config.pathspace.step == 0.01

    def test_empty_object_is_valid(self) -> None:
        assert config_from_dict({}) == SuiteConfig.default()


class TestRejections:
    """Schema and semantic violations raise ConfigError listing every problem."""

    def test_unknown_key(self) -> None:
        with pytest.raises(ConfigError) as info:
            config_from_dict({"bogus": 1})
        assert info.value.problems[0].startswith("(root)")

    def test_unknown_fault(self) -> None:
        with pytest.raises(ConfigError):
            config_from_dict({"zigzag": {"inject_fault": "drop_c_z"}})

    def test_odd_row_count(self) -> None:
        with pytest.raises(ConfigError, match="zigzag.rows: 3"):
            config_from_dict({"zigzag": {"rows": [2, 3]}})

    def test_example_connection_needs_plane(self) -> None:
        with pytest.raises(ConfigError, match="needs dimension 2 and rank 2"):
            config_from_dict({"cohomology": {"matrix": {"dimension": 3}}})

    def test_collects_all_problems(self) -> None:
        data = {
            "pathspace": {"step": 0, "fd_step": -1.0},
            "cohomology": {"window": {"min_degree": 3, "max_degree": 1}, "tensor": {"dv": 2, "letter": 4}},
        }
        with pytest.raises(ConfigError) as info:
            config_from_dict(data)
        assert len(info.value.problems) == 4

    def test_nonpositive_tolerance(self) -> None:
        with pytest.raises(ConfigError, match="tolerances.chain_map"):
            config_from_dict({"pathspace": {"tolerances": {"chain_map": 0}}})

    def test_missing_file(self, tmp_path: Path) -> None:
        with pytest.raises(ConfigError, match="cannot read config"):
            load_config(tmp_path / "missing.json")

    def test_invalid_json(self, tmp_path: Path) -> None:
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="not valid JSON"):
            load_config(path)
