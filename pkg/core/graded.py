"""Exact graded kernel: polynomials, matrix polynomials, matrix-valued forms, shuffles.

Everything in this module is immutable and pure. Coefficients are
``fractions.Fraction`` in symbolic mode; the same classes accept ``float``
coefficients, which is how the numerical modules reuse the code path.

Forms live on ℝ^d with coordinates indexed ``0..d-1``. A form term is keyed by
a strictly increasing tuple of generator indices; the Koszul sign of bringing
a concatenation of generators into sorted order is computed once, when the term
is built, by :func:`_merge_generators`. That helper and :func:`koszul_sign` are
the only places signs from reordering odd objects are produced.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence, Union

import numpy as np

from core.errors import DimensionMismatchError, InvalidElementError

Scalar = Union[Fraction, float, int]
Exponent = tuple[int, ...]
Subset = tuple[int, ...]


# ---------------------------------------------------------------------------
# Sign helpers
# ---------------------------------------------------------------------------


def inversion_count(sequence: Sequence[int]) -> int:
    """Number of pairs ``i < j`` with ``sequence[i] > sequence[j]``."""
    return sum(
        1
        for i in range(len(sequence))
        for j in range(i + 1, len(sequence))
        if sequence[i] > sequence[j]
    )


def koszul_sign(degrees: Sequence[int], order: Sequence[int]) -> int:
    """Sign of rearranging graded objects into a new order.

    Args:
        degrees: Degree of each object, in the original order.
        order: ``order[k]`` is the original index of the object that ends up in
            position ``k``.

    Returns:
        +1 or -1: the product of ``(-1)^(|a||b|)`` over every pair of objects
        whose relative order is swapped.
    """
    odd = 0
    for k in range(len(order)):
        for l in range(k + 1, len(order)):
            if order[k] > order[l] and degrees[order[k]] % 2 and degrees[order[l]] % 2:
                odd += 1
    return -1 if odd % 2 else 1


def _merge_generators(left: Subset, right: Subset) -> tuple[int, Subset] | None:
    """Sort the concatenation of two sorted generator tuples.

    Returns ``None`` when a generator repeats (the wedge vanishes), otherwise the
    sign of the sorting permutation together with the merged tuple.
    """
    if set(left) & set(right):
        return None
    swaps = sum(1 for a in left for b in right if a > b)
    return (-1 if swaps % 2 else 1), tuple(sorted(left + right))


def _is_zero(value: Scalar) -> bool:
    return value == 0


# ---------------------------------------------------------------------------
# Polynomial
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Polynomial:
    """A polynomial in ``nvars`` variables.

    Attributes:
        nvars: Number of variables.
        terms: Map from exponent tuple (length ``nvars``) to coefficient. Zero
            coefficients are never stored.
    """

    nvars: int
    terms: Mapping[Exponent, Scalar] = field(default_factory=dict)

    def __post_init__(self) -> None:
        cleaned: dict[Exponent, Scalar] = {}
        for exponent, coefficient in self.terms.items():
            if len(exponent) != self.nvars:
                raise DimensionMismatchError(
                    f"exponent {exponent} does not have {self.nvars} entries"
                )
            if not _is_zero(coefficient):
                cleaned[tuple(exponent)] = coefficient
        object.__setattr__(self, "terms", cleaned)

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> Polynomial:
        return cls(nvars, {})

    @classmethod
    def constant(cls, value: Scalar, nvars: int) -> Polynomial:
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, index: int, nvars: int) -> Polynomial:
        exponent = [0] * nvars
        exponent[index] = 1
        return cls(nvars, {tuple(exponent): Fraction(1)})

    @classmethod
    def monomial(cls, exponent: Exponent, coefficient: Scalar = Fraction(1)) -> Polynomial:
        return cls(len(exponent), {tuple(exponent): coefficient})

    # -- queries ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and dict(self.terms) == dict(other.terms)

    __hash__ = None  # type: ignore[assignment]

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: Polynomial) -> None:
        if self.nvars != other.nvars:
            raise DimensionMismatchError(
                f"polynomials in {self.nvars} and {other.nvars} variables"
            )

    def __add__(self, other: Polynomial) -> Polynomial:
        self._check(other)
        out = dict(self.terms)
        for exponent, coefficient in other.terms.items():
            out[exponent] = out.get(exponent, 0) + coefficient
        return Polynomial(self.nvars, out)

    def __neg__(self) -> Polynomial:
        return Polynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: Polynomial) -> Polynomial:
        return self + (-other)

    def scale(self, factor: Scalar) -> Polynomial:
        return Polynomial(self.nvars, {e: c * factor for e, c in self.terms.items()})

    def __mul__(self, other: Polynomial | Scalar) -> Polynomial:
        if not isinstance(other, Polynomial):
            return self.scale(other)
        self._check(other)
        out: dict[Exponent, Scalar] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exponent = tuple(a + b for a, b in zip(e1, e2))
                out[exponent] = out.get(exponent, 0) + c1 * c2
        return Polynomial(self.nvars, out)

    __rmul__ = __mul__

    # -- calculus -----------------------------------------------------------

    def derivative(self, index: int) -> Polynomial:
        """Partial derivative with respect to variable ``index``."""
        out: dict[Exponent, Scalar] = {}
        for exponent, coefficient in self.terms.items():
            power = exponent[index]
            if power == 0:
                continue
            lowered = list(exponent)
            lowered[index] = power - 1
            out[tuple(lowered)] = out.get(tuple(lowered), 0) + coefficient * power
        return Polynomial(self.nvars, out)

    def substitute(self, index: int, value: Scalar) -> Polynomial:
        """Replace variable ``index`` by a number; the variable count is unchanged."""
        out: dict[Exponent, Scalar] = {}
        for exponent, coefficient in self.terms.items():
            reduced = list(exponent)
            reduced[index] = 0
            key = tuple(reduced)
            out[key] = out.get(key, 0) + coefficient * value ** exponent[index]
        return Polynomial(self.nvars, out)

    def integrate_unit_interval(self, index: int) -> Polynomial:
        """Exact integral of variable ``index`` over [0, 1]."""
        out: dict[Exponent, Scalar] = {}
        for exponent, coefficient in self.terms.items():
            reduced = list(exponent)
            reduced[index] = 0
            key = tuple(reduced)
            out[key] = out.get(key, 0) + coefficient * Fraction(1, exponent[index] + 1)
        return Polynomial(self.nvars, out)

    def drop_variable(self, index: int) -> Polynomial:
        """Remove a variable that no term depends on."""
        out: dict[Exponent, Scalar] = {}
        for exponent, coefficient in self.terms.items():
            if exponent[index]:
                raise InvalidElementError(f"polynomial still depends on variable {index}")
            out[exponent[:index] + exponent[index + 1:]] = coefficient
        return Polynomial(self.nvars - 1, out)

    def lift(self, offset: int, nvars: int) -> Polynomial:
        """Embed into ``nvars`` variables, shifting indices by ``offset``."""
        if offset + self.nvars > nvars:
            raise DimensionMismatchError("lift target has too few variables")
        out = {}
        for exponent, coefficient in self.terms.items():
            out[(0,) * offset + exponent + (0,) * (nvars - offset - self.nvars)] = coefficient
        return Polynomial(nvars, out)

    def evaluate(self, point: Sequence[Scalar]) -> Scalar:
        total: Scalar = 0
        for exponent, coefficient in self.terms.items():
            total += coefficient * math.prod(x ** e for x, e in zip(point, exponent))
        return total

    def evaluate_array(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at an array of points of shape ``(B, nvars)``."""
        points = np.asarray(points, dtype=float)
        out = np.zeros(points.shape[0])
        for exponent, coefficient in self.terms.items():
            out += float(coefficient) * np.prod(points ** np.asarray(exponent), axis=1)
        return out

    def to_float(self) -> Polynomial:
        return Polynomial(self.nvars, {e: float(c) for e, c in self.terms.items()})

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exponent, coefficient in sorted(self.terms.items()):
            factors = "*".join(
                f"x{i}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(exponent) if e
            )
            parts.append(f"{coefficient}" + (f"*{factors}" if factors else ""))
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# MatrixPoly
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MatrixPoly:
    """A square ``r x r`` matrix of polynomials.

    Attributes:
        rank: Matrix size r.
        entries: Row-major grid of :class:`Polynomial`.
    """

    rank: int
    entries: tuple[tuple[Polynomial, ...], ...]

    def __post_init__(self) -> None:
        if len(self.entries) != self.rank or any(len(row) != self.rank for row in self.entries):
            raise DimensionMismatchError(f"matrix is not {self.rank}x{self.rank}")
        nvars = {p.nvars for row in self.entries for p in row}
        if len(nvars) > 1:
            raise DimensionMismatchError("matrix entries have different variable counts")

    @property
    def nvars(self) -> int:
        return self.entries[0][0].nvars

    @classmethod
    def zero(cls, rank: int, nvars: int) -> MatrixPoly:
        return cls(rank, tuple(tuple(Polynomial.zero(nvars) for _ in range(rank)) for _ in range(rank)))

    @classmethod
    def identity(cls, rank: int, nvars: int) -> MatrixPoly:
        return cls.from_constant(
            [[Fraction(int(i == j)) for j in range(rank)] for i in range(rank)], nvars
        )

    @classmethod
    def from_constant(cls, rows: Sequence[Sequence[Scalar]], nvars: int) -> MatrixPoly:
        rank = len(rows)
        return cls(
            rank,
            tuple(tuple(Polynomial.constant(value, nvars) for value in row) for row in rows),
        )

    @classmethod
    def unit_matrix(cls, rank: int, i: int, j: int, poly: Polynomial) -> MatrixPoly:
        """The matrix with ``poly`` at ``(i, j)`` and zeros elsewhere."""
        zero = Polynomial.zero(poly.nvars)
        return cls(
            rank,
            tuple(
                tuple(poly if (a, b) == (i, j) else zero for b in range(rank))
                for a in range(rank)
            ),
        )

    def is_zero(self) -> bool:
        return all(p.is_zero() for row in self.entries for p in row)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MatrixPoly):
            return NotImplemented
        return self.rank == other.rank and self.entries == other.entries

    __hash__ = None  # type: ignore[assignment]

    def _check(self, other: MatrixPoly) -> None:
        if self.rank != other.rank:
            raise DimensionMismatchError(f"ranks {self.rank} and {other.rank} differ")

    def map(self, fn: Callable[[Polynomial], Polynomial]) -> MatrixPoly:
        return MatrixPoly(self.rank, tuple(tuple(fn(p) for p in row) for row in self.entries))

    def __add__(self, other: MatrixPoly) -> MatrixPoly:
        self._check(other)
        return MatrixPoly(
            self.rank,
            tuple(
                tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.entries, other.entries)
            ),
        )

    def __neg__(self) -> MatrixPoly:
        return self.map(lambda p: -p)

    def scale(self, factor: Scalar) -> MatrixPoly:
        return self.map(lambda p: p.scale(factor))

    def __matmul__(self, other: MatrixPoly) -> MatrixPoly:
        self._check(other)
        rank = self.rank
        rows = []
        for i in range(rank):
            row = []
            for j in range(rank):
                total = Polynomial.zero(self.nvars)
                for l in range(rank):
                    left, right = self.entries[i][l], other.entries[l][j]
                    if not left.is_zero() and not right.is_zero():
                        total = total + left * right
                row.append(total)
            rows.append(tuple(row))
        return MatrixPoly(rank, tuple(rows))

    def evaluate_array(self, points: np.ndarray) -> np.ndarray:
        """Numeric values at points of shape ``(B, nvars)``, shape ``(B, r, r)``."""
        points = np.asarray(points, dtype=float)
        out = np.zeros((points.shape[0], self.rank, self.rank))
        for i, row in enumerate(self.entries):
            for j, poly in enumerate(row):
                if not poly.is_zero():
                    out[:, i, j] = poly.evaluate_array(points)
        return out


# ---------------------------------------------------------------------------
# FormElement
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FormElement:
    """An ``r x r`` matrix-valued polynomial differential form on ℝ^d.

    Attributes:
        dimension: d, the number of coordinates.
        rank: r, the matrix size.
        terms: Map from a strictly increasing tuple of generator indices to the
            matrix coefficient of that wedge monomial. Zero coefficients are
            dropped.
    """

    dimension: int
    rank: int
    terms: Mapping[Subset, MatrixPoly] = field(default_factory=dict)

    def __post_init__(self) -> None:
        cleaned: dict[Subset, MatrixPoly] = {}
        for subset, coefficient in self.terms.items():
            subset = tuple(subset)
            if list(subset) != sorted(set(subset)) or any(
                g < 0 or g >= self.dimension for g in subset
            ):
                raise InvalidElementError(f"generator tuple {subset} is not strictly increasing in range")
            if coefficient.rank != self.rank or coefficient.nvars != self.dimension:
                raise DimensionMismatchError(
                    f"coefficient of {subset} does not match d={self.dimension}, r={self.rank}"
                )
            if not coefficient.is_zero():
                cleaned[subset] = coefficient
        object.__setattr__(self, "terms", cleaned)

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, dimension: int, rank: int) -> FormElement:
        return cls(dimension, rank, {})

    @classmethod
    def unit(cls, dimension: int, rank: int) -> FormElement:
        return cls(dimension, rank, {(): MatrixPoly.identity(rank, dimension)})

    @classmethod
    def constant(
        cls, rows: Sequence[Sequence[Scalar]], subset: Subset, dimension: int
    ) -> FormElement:
        """A constant matrix times a single wedge monomial."""
        matrix = MatrixPoly.from_constant(rows, dimension)
        return cls(dimension, matrix.rank, {tuple(subset): matrix})

    @classmethod
    def from_terms(
        cls, dimension: int, rank: int, terms: Iterable[tuple[Subset, MatrixPoly]]
    ) -> FormElement:
        """Build from possibly unsorted generator tuples, applying Koszul signs."""
        out: dict[Subset, MatrixPoly] = {}
        for subset, coefficient in terms:
            if len(set(subset)) != len(subset):
                continue
            ordered = tuple(sorted(subset))
            if inversion_count(subset) % 2:
                coefficient = -coefficient
            out[ordered] = out[ordered] + coefficient if ordered in out else coefficient
        return cls(dimension, rank, out)

    # -- queries ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set[int]:
        return {len(s) for s in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) == 1

    @property
    def degree(self) -> int:
        """Degree of a homogeneous nonzero form."""
        degrees = self.degrees()
        if not degrees:
            raise InvalidElementError("the zero form has no degree")
        if len(degrees) > 1:
            raise InvalidElementError(f"form is inhomogeneous with degrees {sorted(degrees)}")
        return degrees.pop()

    def homogeneous_part(self, degree: int) -> FormElement:
        return FormElement(
            self.dimension, self.rank, {s: c for s, c in self.terms.items() if len(s) == degree}
        )

    def homogeneous_parts(self) -> Iterator[tuple[int, FormElement]]:
        for degree in sorted(self.degrees()):
            yield degree, self.homogeneous_part(degree)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FormElement):
            return NotImplemented
        return (
            self.dimension == other.dimension
            and self.rank == other.rank
            and dict(self.terms) == dict(other.terms)
        )

    __hash__ = None  # type: ignore[assignment]

    # -- linear structure ---------------------------------------------------

    def _check(self, other: FormElement) -> None:
        if (self.dimension, self.rank) != (other.dimension, other.rank):
            raise DimensionMismatchError(
                f"forms over (d={self.dimension}, r={self.rank}) and "
                f"(d={other.dimension}, r={other.rank})"
            )

    def __add__(self, other: FormElement) -> FormElement:
        self._check(other)
        out = dict(self.terms)
        for subset, coefficient in other.terms.items():
            out[subset] = out[subset] + coefficient if subset in out else coefficient
        return FormElement(self.dimension, self.rank, out)

    def __neg__(self) -> FormElement:
        return FormElement(self.dimension, self.rank, {s: -c for s, c in self.terms.items()})

    def __sub__(self, other: FormElement) -> FormElement:
        return self + (-other)

    def scale(self, factor: Scalar) -> FormElement:
        return FormElement(
            self.dimension, self.rank, {s: c.scale(factor) for s, c in self.terms.items()}
        )

    def map_coefficients(self, fn: Callable[[Polynomial], Polynomial]) -> FormElement:
        return FormElement(self.dimension, self.rank, {s: c.map(fn) for s, c in self.terms.items()})

    def to_float(self) -> FormElement:
        return self.map_coefficients(Polynomial.to_float)

    # -- change of base -----------------------------------------------------

    def lift(self) -> FormElement:
        """Pull back along the projection ℝ^(d+1) -> ℝ^d forgetting a new coordinate 0."""
        nvars = self.dimension + 1
        return FormElement(
            nvars,
            self.rank,
            {
                tuple(g + 1 for g in s): c.map(lambda p: p.lift(1, nvars))
                for s, c in self.terms.items()
            },
        )

    def restrict(self, coordinate: int, value: Scalar) -> FormElement:
        """Pull back along the inclusion of the slice ``x_coordinate = value``.

        The result keeps the ambient dimension; terms containing the generator of
        that coordinate vanish.
        """
        return FormElement(
            self.dimension,
            self.rank,
            {
                s: c.map(lambda p: p.substitute(coordinate, value))
                for s, c in self.terms.items()
                if coordinate not in s
            },
        )

    def drop_leading_coordinate(self) -> FormElement:
        """Inverse of :meth:`lift` for forms that no longer mention coordinate 0."""
        nvars = self.dimension - 1
        out = {}
        for subset, coefficient in self.terms.items():
            if 0 in subset:
                raise InvalidElementError("form still contains the leading generator")
            out[tuple(g - 1 for g in subset)] = coefficient.map(lambda p: p.drop_variable(0))
        return FormElement(nvars, self.rank, out)

    # -- numerics -----------------------------------------------------------

    def evaluate_array(self, points: np.ndarray) -> dict[Subset, np.ndarray]:
        """Coefficient matrices at points ``(B, d)``, keyed by generator tuple."""
        return {s: c.evaluate_array(points) for s, c in self.terms.items()}

    def evaluate_on_vectors(self, point: Sequence[float], vectors: Sequence[Sequence[float]]) -> np.ndarray:
        """Value of a homogeneous form at one point on a list of tangent vectors."""
        degree = len(vectors)
        values = self.homogeneous_part(degree).evaluate_array(np.asarray([point], dtype=float))
        out = np.zeros((self.rank, self.rank))
        for subset, matrices in values.items():
            block = np.array([[vectors[j][g] for g in subset] for j in range(degree)], dtype=float)
            determinant = np.linalg.det(block) if degree else 1.0
            out += determinant * matrices[0]
        return out


# ---------------------------------------------------------------------------
# Operations on forms
# ---------------------------------------------------------------------------


def wedge(a: FormElement, b: FormElement) -> FormElement:
    """Wedge product with matrix composition of coefficients, in the given order.

    Raises:
        DimensionMismatchError: If ``a`` and ``b`` differ in d or r.
    """
    a._check(b)
    out: dict[Subset, MatrixPoly] = {}
    for s1, c1 in a.terms.items():
        for s2, c2 in b.terms.items():
            merged = _merge_generators(s1, s2)
            if merged is None:
                continue
            sign, subset = merged
            product = c1 @ c2
            if sign < 0:
                product = -product
            out[subset] = out[subset] + product if subset in out else product
    return FormElement(a.dimension, a.rank, out)


def exterior_derivative(a: FormElement) -> FormElement:
    """The de Rham differential applied entrywise to the matrix coefficients."""
    out: dict[Subset, MatrixPoly] = {}
    for subset, coefficient in a.terms.items():
        for g in range(a.dimension):
            if g in subset:
                continue
            partial = coefficient.map(lambda p, g=g: p.derivative(g))
            if partial.is_zero():
                continue
            sign, merged = _merge_generators((g,), subset)  # type: ignore[misc]
            if sign < 0:
                partial = -partial
            out[merged] = out[merged] + partial if merged in out else partial
    return FormElement(a.dimension, a.rank, out)


def graded_commutator(a: FormElement, b: FormElement) -> FormElement:
    """``[a, b] = ab - (-1)^(|a||b|) ba``, extended bilinearly over homogeneous parts."""
    a._check(b)
    total = FormElement.zero(a.dimension, a.rank)
    for p, ap in a.homogeneous_parts():
        for q, bq in b.homogeneous_parts():
            swapped = wedge(bq, ap)
            if (p * q) % 2 == 0:
                swapped = -swapped
            total = total + wedge(ap, bq) + swapped
    return total


# ---------------------------------------------------------------------------
# Shuffles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Shuffle:
    """An (n, m)-shuffle ``σ`` of ``{1..n+m}``.

    Attributes:
        n: Size of the left block.
        m: Size of the right block.
        image: ``image[i-1] = σ(i)`` for ``i = 1..n+m``.
    """

    n: int
    m: int
    image: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.image) != list(range(1, self.n + self.m + 1)):
            raise InvalidElementError(f"{self.image} is not a permutation of 1..{self.n + self.m}")
        left, right = self.image[: self.n], self.image[self.n:]
        if list(left) != sorted(left) or list(right) != sorted(right):
            raise InvalidElementError(f"{self.image} is not an ({self.n},{self.m}) shuffle")

    def __call__(self, i: int) -> int:
        return self.image[i - 1]

    @property
    def inversions(self) -> int:
        return inversion_count(self.image)

    @property
    def sign(self) -> int:
        return -1 if self.inversions % 2 else 1

    def sigma_sh(self) -> tuple[int, ...]:
        """The reversed shuffle acting on zags, ``σ^Sh``, as an image tuple."""
        total = self.n + self.m + 1
        left = [total - self(self.n + 1 - i) for i in range(1, self.n + 1)]
        right = [total - self(self.n + self.m + 1 - j) for j in range(1, self.m + 1)]
        return tuple(left + right)

    @property
    def sh_sign(self) -> int:
        return -1 if inversion_count(self.sigma_sh()) % 2 else 1

    def to_dict(self) -> dict[str, object]:
        return {"n": self.n, "m": self.m, "image": list(self.image), "parity": self.inversions % 2}


def enumerate_shuffles(n: int, m: int) -> list[Shuffle]:
    """All (n, m)-shuffles, ordered lexicographically by the image of the left block."""
    if n < 0 or m < 0:
        raise InvalidElementError("shuffle block sizes must be nonnegative")
    total = n + m
    shuffles = []
    for left in itertools.combinations(range(1, total + 1), n):
        right = tuple(i for i in range(1, total + 1) if i not in left)
        shuffles.append(Shuffle(n, m, tuple(left) + right))
    return shuffles
