"""Exception hierarchy shared by the kernel, the application layer and the CLI.

Every error derives from ``ValueError`` so callers that only care about
"bad input" can catch the base class, while tests and the CLI can match the
precise failure.
"""

from __future__ import annotations


class CurvedZigzagError(ValueError):
    """Base class for all domain errors raised by this project."""


class DimensionMismatchError(CurvedZigzagError):
    """Operands live over different (d, r) or different carrier algebras."""


class InvalidConnectionError(CurvedZigzagError):
    """A connection form is not homogeneous of degree 1."""


class InvalidElementError(CurvedZigzagError):
    """An element has the wrong degree, is inhomogeneous, or is zero where a degree is needed."""


class InvariantViolationError(CurvedZigzagError):
    """A truncation window is not preserved by the differential."""


class UnsupportedCarrierError(CurvedZigzagError):
    """An operation was requested on a carrier that does not support it."""


class IntegrationError(CurvedZigzagError):
    """The transport integrator met nonfinite values."""


class ArityError(CurvedZigzagError):
    """A path-space form was evaluated on the wrong number of tangent fields."""


class ConfigError(CurvedZigzagError):
    """A suite configuration failed schema or semantic validation."""

    def __init__(self, problems: list[str] | str) -> None:
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
