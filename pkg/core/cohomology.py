"""Curved cohomology and the cohomology of the maximal sub-DGA on truncation windows.

For a curved DGA (A, ∇, R) the curved kernel in degree p is

    cur(∇^p) = { a ∈ A^p : ∇a = [R, η] for some η ∈ A^(p-1) }

and ``H^p_cur = cur(∇^p) / im(∇^(p-1))``. The maximal sub-DGA is
``Ã = ker ∇²``, an ordinary cochain complex.

Everything is computed by exact rational linear algebra on a finite window of
basis keys: all forms of polynomial degree at most D for matrix-form
instances, or all words of a fixed length for the tensor algebra. The witness
η is searched inside the window only, so dimensions for matrix forms are
window-relative and the report says so.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Mapping, Sequence

from core.curved_dga import CurvedDGA, DGAMorphismWitness, MatrixFormCDGA, TensorCDGA
from core.errors import InvalidElementError, InvariantViolationError
from core.linear import (
    Key,
    Vec,
    columns_to_rows,
    independent_subset,
    nullspace,
    rank,
    solve,
    vec_sub,
)

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class TruncationWindow:
    """A finite window of the algebra on which cohomology is computed.

    Attributes:
        min_degree: Lowest degree reported.
        max_degree: Highest degree reported.
        cap: Polynomial-degree cap D for matrix-form instances; ignored by the
            tensor algebra, whose pieces are complete per degree.
        total_degree: Bound polynomial degree plus form degree by ``cap``
            instead of the polynomial degree alone. ``d`` preserves this
            filtration, so flat instances satisfy the Poincaré lemma on it;
            ``[A, −]`` raises it, so curved instances use the plain cap.
    """

    min_degree: int = 0
    max_degree: int = 2
    cap: int | None = 3
    total_degree: bool = False

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.min_degree < 0 or self.max_degree < self.min_degree:
            raise ValueError(
                f"degree range [{self.min_degree}, {self.max_degree}] is empty or negative"
            )
        if self.cap is not None and self.cap < 0:
            raise ValueError(f"cap must be nonnegative, got {self.cap}")

    def degrees(self) -> range:
        return range(self.min_degree, self.max_degree + 1)

    def cap_at(self, degree: int) -> int | None:
        """Polynomial-degree cap of the degree-``degree`` piece; negative means empty."""
        if self.cap is None or not self.total_degree:
            return self.cap
        return self.cap - degree

    def to_dict(self) -> dict[str, Any]:
        return {
            "min_degree": self.min_degree,
            "max_degree": self.max_degree,
            "cap": self.cap,
            "total_degree": self.total_degree,
        }


@dataclass
class DegreeCohomology:
    """Dimensions in one degree.

    Attributes:
        degree: p.
        dim_kernel: dim cur(∇^p) (curved) or dim ker(∇^p) inside Ã (maximal sub-DGA).
        dim_image: dim im(∇^(p-1)) (restricted to Ã for the maximal sub-DGA).
        dim_cohomology: The quotient dimension.
        representatives: Up to a few classes spanning a complement of the image.
    """

    degree: int
    dim_kernel: int
    dim_image: int
    dim_cohomology: int
    representatives: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "degree": self.degree,
            "dim_kernel": self.dim_kernel,
            "dim_image": self.dim_image,
            "dim_cohomology": self.dim_cohomology,
            "representatives": list(self.representatives),
        }


@dataclass
class CohomologyReport:
    """Per-degree dimensions of curved or maximal-sub-DGA cohomology on a window."""

    instance: str
    kind: str
    window: TruncationWindow
    window_relative: bool
    degrees: list[DegreeCohomology]

    def dims(self) -> dict[int, int]:
        return {d.degree: d.dim_cohomology for d in self.degrees}

    def at(self, degree: int) -> DegreeCohomology:
        for entry in self.degrees:
            if entry.degree == degree:
                return entry
        raise KeyError(degree)

    def to_dict(self) -> dict[str, Any]:
        return {
            "instance": self.instance,
            "kind": self.kind,
            "window": self.window.to_dict(),
            "window_relative": self.window_relative,
            "degrees": [d.to_dict() for d in self.degrees],
        }


# ---------------------------------------------------------------------------
# Window complex
# ---------------------------------------------------------------------------


class _WindowComplex:
    """Bases, ∇-matrices and [R, −]-matrices of one instance on one window."""

    def __init__(self, inst: CurvedDGA, window: TruncationWindow) -> None:
        if not isinstance(inst, (MatrixFormCDGA, TensorCDGA)):
            raise InvalidElementError(f"{inst.name} has no truncation windows")
        self.inst = inst
        self.window = window
        self._bases: dict[int, list[Key]] = {}
        self._indices: dict[int, dict[Key, int]] = {}
        self._nabla: dict[int, list[list[Fraction]]] = {}

    def basis(self, degree: int) -> list[Key]:
        if degree not in self._bases:
            cap = self.window.cap_at(degree)
            if degree < 0 or (cap is not None and cap < 0):
                self._bases[degree] = []
            else:
                self._bases[degree] = self.inst.window_basis(degree, cap)  # type: ignore[attr-defined]
            self._indices[degree] = {k: i for i, k in enumerate(self._bases[degree])}
        return self._bases[degree]

    def index(self, degree: int) -> dict[Key, int]:
        self.basis(degree)
        return self._indices[degree]

    def coordinates(self, vec: Mapping[Key, Fraction], degree: int) -> list[Fraction]:
        index = self.index(degree)
        out = [Fraction(0)] * len(index)
        for key, coefficient in vec.items():
            if key not in index:
                raise InvariantViolationError(
                    f"{self.inst.describe_key(key)} lies outside the degree-{degree} window"
                )
            out[index[key]] = Fraction(coefficient)
        return out

    def vector(self, coordinates: Sequence[Fraction], degree: int) -> Vec:
        return {k: c for k, c in zip(self.basis(degree), coordinates) if c != 0}

    def _rows(self, columns: list[Vec], degree: int, what: str) -> list[list[Fraction]]:
        try:
            return columns_to_rows(columns, self.index(degree))
        except KeyError as exc:
            raise InvariantViolationError(
                f"{what} leaves the window on {self.inst.name}: "
                f"{self.inst.describe_key(exc.args[0])} has degree {degree} "
                f"but exceeds the cap {self.window.cap}"
            ) from exc

    def nabla_matrix(self, degree: int) -> list[list[Fraction]]:
        """Matrix of ∇: window^degree -> window^(degree+1)."""
        if degree not in self._nabla:
            columns = [self.inst.nabla_key(k) for k in self.basis(degree)]
            self._nabla[degree] = self._rows(columns, degree + 1, "the differential")
        return self._nabla[degree]

    def curvature_matrix(self, degree: int) -> list[list[Fraction]]:
        """Matrix of η ↦ [R, η] from window^(degree-2) to window^degree."""
        curvature = self.inst.curvature
        columns = [self.inst.commutator(curvature, {k: Fraction(1)}) for k in self.basis(degree - 2)]
        return self._rows(columns, degree, "the curvature commutator")


def _matmul(left: list[list[Fraction]], right: list[list[Fraction]], inner: int, ncols: int) -> list[list[Fraction]]:
    out = []
    for row in left:
        out.append(
            [sum((row[l] * right[l][j] for l in range(inner) if row[l]), Fraction(0)) for j in range(ncols)]
        )
    return out


def _columns(matrix: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    return [[row[j] for row in matrix] for j in range(ncols)]


def _representatives(
    complex_: _WindowComplex,
    kernel_vectors: list[list[Fraction]],
    image_vectors: list[list[Fraction]],
    degree: int,
    limit: int,
) -> list[str]:
    if limit <= 0 or not kernel_vectors:
        return []
    dimension = len(complex_.basis(degree))
    chosen = independent_subset(kernel_vectors[: max(limit * 4, limit)], dimension, start=image_vectors)
    return [
        complex_.inst.describe(complex_.vector(kernel_vectors[i], degree)) for i in chosen[:limit]
    ]


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def curved_cohomology(inst: CurvedDGA, window: TruncationWindow, representatives: int = 3) -> CohomologyReport:
    """Dimensions of ``H^p_cur`` for every degree in the window.

    Raises:
        InvariantViolationError: If ∇ or [R, −] leaves the window.
    """
    complex_ = _WindowComplex(inst, window)
    degrees = []
    for p in window.degrees():
        n_p, n_prev = len(complex_.basis(p)), len(complex_.basis(p - 1))
        nabla = complex_.nabla_matrix(p)
        curvature = complex_.curvature_matrix(p + 1)
        stacked = [row + [-c for c in crow] for row, crow in zip(nabla, curvature)]
        solutions = nullspace(stacked, n_p + n_prev)
        kernel_vectors = [s[:n_p] for s in solutions if any(s[:n_p])]
        dim_kernel = rank(_columns_as_rows(kernel_vectors, n_p), len(kernel_vectors)) if kernel_vectors else 0
        image_vectors = _columns(complex_.nabla_matrix(p - 1), n_prev) if p > 0 else []
        dim_image = rank(complex_.nabla_matrix(p - 1), n_prev) if p > 0 else 0
        LOGGER.debug("curved degree %d on %s: basis %d, cur %d, im %d", p, inst.name, n_p, dim_kernel, dim_image)
        degrees.append(
            DegreeCohomology(
                p,
                dim_kernel,
                dim_image,
                dim_kernel - dim_image,
                _representatives(complex_, kernel_vectors, image_vectors, p, representatives),
            )
        )
    LOGGER.info("curved cohomology of %s on %s", inst.name, window.to_dict())
    return CohomologyReport(inst.name, "curved", window, isinstance(inst, MatrixFormCDGA), degrees)


def _columns_as_rows(vectors: list[list[Fraction]], dimension: int) -> list[list[Fraction]]:
    return [[v[i] for v in vectors] for i in range(dimension)]


def maximal_subdga_cohomology(inst: CurvedDGA, window: TruncationWindow, representatives: int = 3) -> CohomologyReport:
    """Cohomology of ``Ã = ker ∇²`` with the restricted differential."""
    complex_ = _WindowComplex(inst, window)

    def subdga_basis(degree: int) -> list[list[Fraction]]:
        n = len(complex_.basis(degree))
        if degree < 0 or n == 0:
            return []
        n_next = len(complex_.basis(degree + 1))
        square = _matmul(complex_.nabla_matrix(degree + 1), complex_.nabla_matrix(degree), n_next, n)
        return nullspace(square, n)

    degrees = []
    for p in window.degrees():
        n_p, n_prev = len(complex_.basis(p)), len(complex_.basis(p - 1))
        kernel_vectors = nullspace(complex_.nabla_matrix(p), n_p)
        dim_kernel = len(kernel_vectors)
        image_vectors: list[list[Fraction]] = []
        if p > 0:
            sub_prev = subdga_basis(p - 1)
            if sub_prev:
                restricted = _matmul(
                    complex_.nabla_matrix(p - 1), _columns_as_rows(sub_prev, n_prev), n_prev, len(sub_prev)
                )
                image_vectors = _columns(restricted, len(sub_prev))
        dim_image = rank(_columns_as_rows(image_vectors, n_p), len(image_vectors)) if image_vectors else 0
        degrees.append(
            DegreeCohomology(
                p,
                dim_kernel,
                dim_image,
                dim_kernel - dim_image,
                _representatives(complex_, kernel_vectors, image_vectors, p, representatives),
            )
        )
    LOGGER.info("maximal sub-dga cohomology of %s on %s", inst.name, window.to_dict())
    return CohomologyReport(inst.name, "maximal-subdga", window, isinstance(inst, MatrixFormCDGA), degrees)


def _as_vec(inst: CurvedDGA, element: Any) -> Vec:
    vec = inst.expand(element)
    return vec


def is_curved_closed(inst: CurvedDGA, omega: Any, window: TruncationWindow) -> Vec | None:
    """A witness η with ``∇ω = [R, η]`` inside the window, or ``None``."""
    vec = _as_vec(inst, omega)
    if not vec:
        return {}
    degree = inst.degree_of(vec)
    complex_ = _WindowComplex(inst, window)
    target = complex_.coordinates(inst.nabla(vec), degree + 1)
    solution = solve(complex_.curvature_matrix(degree + 1), len(complex_.basis(degree - 1)), target)
    if solution is None:
        return None
    return complex_.vector(solution, degree - 1)


def is_curved_exact(inst: CurvedDGA, omega: Any, window: TruncationWindow) -> bool:
    """True iff ω = ∇η for some η of one degree lower inside the window."""
    vec = _as_vec(inst, omega)
    if not vec:
        return True
    degree = inst.degree_of(vec)
    if degree == 0:
        return False
    complex_ = _WindowComplex(inst, window)
    target = complex_.coordinates(vec, degree)
    return solve(complex_.nabla_matrix(degree - 1), len(complex_.basis(degree - 1)), target) is not None


def curved_kernel_basis(inst: CurvedDGA, window: TruncationWindow, degree: int) -> list[Vec]:
    """A spanning set of ``cur(∇^degree)`` inside the window."""
    complex_ = _WindowComplex(inst, window)
    n_p, n_prev = len(complex_.basis(degree)), len(complex_.basis(degree - 1))
    stacked = [
        row + [-c for c in crow]
        for row, crow in zip(complex_.nabla_matrix(degree), complex_.curvature_matrix(degree + 1))
    ]
    return [
        complex_.vector(s[:n_p], degree)
        for s in nullspace(stacked, n_p + n_prev)
        if any(s[:n_p])
    ]


def morphism_preserves_cohomology(w: DGAMorphismWitness, window: TruncationWindow) -> bool:
    """Check ``f(cur) ⊆ cur`` and ``f(im) ⊆ im`` on window bases."""
    source, target = w.source, w.target
    complex_ = _WindowComplex(source, window)
    for p in window.degrees():
        for a in curved_kernel_basis(source, window, p):
            if is_curved_closed(target, w.apply(a), window) is None:
                LOGGER.info("%s maps a curved-closed element out of cur in degree %d", w.name, p)
                return False
        if p == 0:
            continue
        for key in complex_.basis(p - 1):
            if not is_curved_exact(target, w.apply(source.nabla_key(key)), window):
                LOGGER.info("%s maps an exact element out of im in degree %d", w.name, p)
                return False
    return True


def homotopy_invariance_check(
    f: DGAMorphismWitness,
    g: DGAMorphismWitness,
    h: Callable[[Key], Vec],
    window: TruncationWindow,
) -> bool:
    """Check ``f - g = ∇_B∘h + h∘∇_A`` on the window and that f, g agree on ``H_cur``.

    Args:
        f: First morphism.
        g: Second morphism with the same source and target.
        h: Degree -1 map on source basis keys with values in the target.
        window: Window of the source used for both checks.
    """
    source, target = f.source, f.target

    def apply_h(vec: Mapping[Key, Fraction]) -> Vec:
        out: dict = {}
        for key, coefficient in vec.items():
            for k, c in h(key).items():
                out[k] = out.get(k, 0) + coefficient * c
        return {k: c for k, c in out.items() if c != 0}

    complex_ = _WindowComplex(source, window)
    for p in window.degrees():
        for key in complex_.basis(p):
            unit = {key: Fraction(1)}
            lhs = vec_sub(f.apply(unit), g.apply(unit))
            rhs = target.nabla(apply_h(unit))
            for k, c in apply_h(source.nabla_key(key)).items():
                rhs[k] = rhs.get(k, 0) + c
            rhs = {k: c for k, c in rhs.items() if c != 0}
            if lhs != rhs:
                LOGGER.info("homotopy identity fails on %s", source.describe_key(key))
                return False
        for a in curved_kernel_basis(source, window, p):
            difference = vec_sub(f.apply(a), g.apply(a))
            if not is_curved_exact(target, difference, window):
                LOGGER.info("induced maps differ in degree %d", p)
                return False
    return True
