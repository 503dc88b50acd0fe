"""Suite configuration: JSON files validated by schema, then by semantic rules.

A config file may set any subset of keys; everything else falls back to the
defaults of :meth:`SuiteConfig.default`, whose trial counts are the
acceptance-level ones.
"""

from __future__ import annotations

import copy
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Mapping

from jsonschema import Draft202012Validator

from core.errors import ConfigError

LOGGER = logging.getLogger(__name__)

SCHEMA_PATH = Path(__file__).resolve().parent.parent / "standards" / "suite_config.schema.json"

FAULTS = (None, "c_z_sign", "shuffle_sign")


def _zigzag_trials() -> dict[str, int]:
    return {
        "axioms": 200,
        "d_squared": 50,
        "leibniz": 50,
        "associativity": 50,
        "unit": 20,
        "homotopy": 100,
        "confluence": 500,
        "quotient": 50,
        "functoriality": 20,
        "bar": 50,
        "collapse": 20,
    }


def _pathspace_tolerances() -> dict[str, float]:
    return {
        "transport": 1e-6,
        "transport_derivative": 1e-4,
        "stokes": 1e-8,
        "ev0_triangle": 1e-6,
        "covariant_derivative": 1e-4,
        "alternation": 1e-8,
        "quotient_invariance": 1e-6,
        "boundary_term": 1e-8,
        "chain_map": 1e-2,
        "algebra_map": 1e-3,
        "triangle": 1e-3,
        "shrink_homotopy": 1e-2,
        "convergence_gate": 1e-3,
    }


def _pathspace_fixtures() -> dict[str, int]:
    return {
        "transport": 5,
        "transport_derivative": 10,
        "stokes": 10,
        "ev0_triangle": 10,
        "covariant_derivative": 5,
        "alternation": 5,
        "quotient_invariance": 5,
        "boundary_term": 5,
        "chain_map": 4,
        "algebra_map": 10,
        "triangle": 20,
        "shrink_homotopy": 2,
        "convergence_gate": 3,
    }


@dataclass(frozen=True)
class MatrixSection:
    """Matrix-form carrier: dimension d, rank r and a named connection."""

    dimension: int = 2
    rank: int = 2
    connection: str = "example"


@dataclass(frozen=True)
class TensorSection:
    """Tensor carrier ``T(V)`` with ``v = e_letter``; ``letter = None`` gives ``v = 0``."""

    dv: int = 2
    letter: int | None = 0


@dataclass(frozen=True)
class ZigzagSection:
    instances: tuple[str, ...] = ("matrix-form", "tensor")
    rows: tuple[int, ...] = (2, 4)
    columns: tuple[int, ...] = (0, 1, 2)
    entry_degree_cap: int = 2
    trials: Mapping[str, int] = field(default_factory=_zigzag_trials)
    inject_fault: str | None = None
    matrix: MatrixSection = field(default_factory=MatrixSection)
    tensor: TensorSection = field(default_factory=TensorSection)


@dataclass(frozen=True)
class PathspaceSection:
    step: float = 1e-3
    order: int = 8
    fd_step: float = 1e-4
    max_columns: int = 2
    max_fields: int = 2
    tolerances: Mapping[str, float] = field(default_factory=_pathspace_tolerances)
    fixtures: Mapping[str, int] = field(default_factory=_pathspace_fixtures)


@dataclass(frozen=True)
class WindowSection:
    min_degree: int = 0
    max_degree: int = 2
    cap: int = 3


@dataclass(frozen=True)
class CohomologySection:
    tensor: TensorSection = field(default_factory=TensorSection)
    tensor_max_degree: int = 4
    matrix: MatrixSection = field(default_factory=MatrixSection)
    window: WindowSection = field(default_factory=WindowSection)
    representatives: int = 3


@dataclass(frozen=True)
class SuiteConfig:
    """Everything a suite run depends on; two runs with equal configs give equal reports."""

    seed: int = 0
    workers: int = 1
    output: str | None = None
    zigzag: ZigzagSection = field(default_factory=ZigzagSection)
    pathspace: PathspaceSection = field(default_factory=PathspaceSection)
    cohomology: CohomologySection = field(default_factory=CohomologySection)

    @classmethod
    def default(cls) -> SuiteConfig:
        return cls()

    def with_overrides(self, seed: int | None = None, workers: int | None = None, output: str | None = None) -> SuiteConfig:
        data = self.to_dict()
        if seed is not None:
            data["seed"] = seed
        if workers is not None:
            data["workers"] = workers
        if output is not None:
            data["output"] = output
        return config_from_dict(data)

    def validate(self) -> None:
        """Semantic checks the schema cannot express.

        Raises:
            ConfigError: Listing every violated rule.
        """
        problems: list[str] = []
        z, p, c = self.zigzag, self.pathspace, self.cohomology
        for k in z.rows:
            if k < 2 or k % 2:
                problems.append(f"zigzag.rows: {k} is not an even integer >= 2")
        for n in z.columns:
            if n < 0:
                problems.append(f"zigzag.columns: {n} is negative")
        if z.inject_fault not in FAULTS:
            problems.append(f"zigzag.inject_fault: unknown fault {z.inject_fault!r}")
        for name, value in z.trials.items():
            if value < 0:
                problems.append(f"zigzag.trials.{name}: must be nonnegative")
        if p.step <= 0:
            problems.append("pathspace.step: must be positive")
        if p.fd_step <= 0:
            problems.append("pathspace.fd_step: must be positive")
        for name, value in p.tolerances.items():
            if value <= 0:
                problems.append(f"pathspace.tolerances.{name}: must be positive")
        for where, section in (("zigzag.matrix", z.matrix), ("cohomology.matrix", c.matrix)):
            if section.connection not in ("example", "flat"):
                problems.append(f"{where}.connection: unknown connection {section.connection!r}")
            if section.connection == "example" and (section.dimension, section.rank) != (2, 2):
                problems.append(f"{where}: the example connection needs dimension 2 and rank 2")
        for where, tensor in (("zigzag.tensor", z.tensor), ("cohomology.tensor", c.tensor)):
            if tensor.letter is not None and tensor.letter >= tensor.dv:
                problems.append(f"{where}.letter: {tensor.letter} is outside 0..{tensor.dv - 1}")
        if c.window.min_degree > c.window.max_degree:
            problems.append("cohomology.window: min_degree exceeds max_degree")
        if self.workers < 1:
            problems.append("workers: must be at least 1")
        if problems:
            raise ConfigError(problems)

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["zigzag"]["instances"] = list(self.zigzag.instances)
        data["zigzag"]["rows"] = list(self.zigzag.rows)
        data["zigzag"]["columns"] = list(self.zigzag.columns)
        data["zigzag"]["trials"] = dict(self.zigzag.trials)
        data["pathspace"]["tolerances"] = dict(self.pathspace.tolerances)
        data["pathspace"]["fixtures"] = dict(self.pathspace.fixtures)
        return data


def _schema_validator() -> Draft202012Validator:
    with open(SCHEMA_PATH) as f:
        return Draft202012Validator(json.load(f))


def schema_problems(data: Any) -> list[str]:
    """Schema violations as ``location: message`` strings, sorted by location."""
    errors = sorted(_schema_validator().iter_errors(data), key=lambda e: list(map(str, e.path)))
    return [f"{'.'.join(str(p) for p in e.path) or '(root)'}: {e.message}" for e in errors]


def _merged(defaults: Mapping[str, Any], given: Mapping[str, Any] | None) -> dict[str, Any]:
    out = dict(defaults)
    out.update(given or {})
    return out


def _matrix(data: Mapping[str, Any] | None) -> MatrixSection:
    return MatrixSection(**(data or {}))


def _tensor(data: Mapping[str, Any] | None) -> TensorSection:
    return TensorSection(**(data or {}))


def config_from_dict(data: Mapping[str, Any]) -> SuiteConfig:
    """Build and validate a config from parsed JSON.

    Raises:
        ConfigError: On schema or semantic violations.
    """
    problems = schema_problems(data)
    if problems:
        raise ConfigError(problems)
    data = copy.deepcopy(dict(data))
    z = data.get("zigzag", {})
    p = data.get("pathspace", {})
    c = data.get("cohomology", {})
    zigzag = ZigzagSection(
        instances=tuple(z.get("instances", ZigzagSection.instances)),
        rows=tuple(z.get("rows", ZigzagSection.rows)),
        columns=tuple(z.get("columns", ZigzagSection.columns)),
        entry_degree_cap=z.get("entry_degree_cap", ZigzagSection.entry_degree_cap),
        trials=_merged(_zigzag_trials(), z.get("trials")),
        inject_fault=z.get("inject_fault"),
        matrix=_matrix(z.get("matrix")),
        tensor=_tensor(z.get("tensor")),
    )
    pathspace = PathspaceSection(
        step=p.get("step", PathspaceSection.step),
        order=p.get("order", PathspaceSection.order),
        fd_step=p.get("fd_step", PathspaceSection.fd_step),
        max_columns=p.get("max_columns", PathspaceSection.max_columns),
        max_fields=p.get("max_fields", PathspaceSection.max_fields),
        tolerances=_merged(_pathspace_tolerances(), p.get("tolerances")),
        fixtures=_merged(_pathspace_fixtures(), p.get("fixtures")),
    )
    cohomology = CohomologySection(
        tensor=_tensor(c.get("tensor")),
        tensor_max_degree=c.get("tensor_max_degree", CohomologySection.tensor_max_degree),
        matrix=_matrix(c.get("matrix")),
        window=WindowSection(**c.get("window", {})),
        representatives=c.get("representatives", CohomologySection.representatives),
    )
    config = SuiteConfig(
        seed=data.get("seed", 0),
        workers=data.get("workers", 1),
        output=data.get("output"),
        zigzag=zigzag,
        pathspace=pathspace,
        cohomology=cohomology,
    )
    config.validate()
    return config


def load_config(path: str | Path | None) -> SuiteConfig:
    """Read a JSON config file; ``None`` gives the defaults.

    Raises:
        ConfigError: If the file is unreadable, not JSON, or invalid.
    """
    if path is None:
        return SuiteConfig.default()
    try:
        with open(path) as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}") from e
    LOGGER.info("loaded config from %s", path)
    return config_from_dict(data)
