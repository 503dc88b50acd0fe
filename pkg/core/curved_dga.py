"""Curved differential graded algebras, their shipped instances, and morphisms.

A curved DGA is a graded unital algebra with a degree +1 derivation ∇ and a
degree 2 curvature element R such that ∇² = [R, −] and ∇R = 0. Every instance
in this module exposes its elements in a basis-key representation (see
:mod:`core.linear`) so that the generic checkers, the cohomology solver and the
zigzag construction work over any of them:

- ``multiply_keys`` / ``nabla_key`` act on single basis keys and are cached per
  instance;
- ``multiply`` / ``nabla`` / ``commutator`` extend them linearly;
- ``expand`` / ``realize`` convert between native elements and key vectors.

Two instances ship: matrix-valued polynomial forms on ℝ^d with a connection
``∇ = d + [A, −]`` and the tensor algebra ``(T(V), [v, −], v ⊗ v)``.
"""

from __future__ import annotations

import abc
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from core.errors import (
    DimensionMismatchError,
    InvalidConnectionError,
    InvalidElementError,
)
from core.graded import (
    Exponent,
    FormElement,
    MatrixPoly,
    Polynomial,
    Subset,
    _merge_generators,
    exterior_derivative,
    graded_commutator,
    wedge,
)
from core.linear import Key, Vec, vec_accumulate, vec_add, vec_scale, vec_sub

LOGGER = logging.getLogger(__name__)

UNIT_MATRIX_KEY = "I"


def _random_fraction(rng: np.random.Generator) -> Fraction:
    numerator = int(rng.integers(-3, 4)) or 1
    return Fraction(numerator, int(rng.integers(1, 3)))


# ---------------------------------------------------------------------------
# Interface
# ---------------------------------------------------------------------------


class CurvedDGA(abc.ABC):
    """A curved DGA presented on a basis of homogeneous keys.

    Subclasses implement the key-level structure; the linear extensions,
    caching and sampling helpers live here.
    """

    name: str = "curved-dga"
    commutative: bool = False

    def __init__(self) -> None:
        self._product_cache: dict[tuple[Key, Key], Vec] = {}
        self._nabla_cache: dict[Key, Vec] = {}

    # -- structure supplied by subclasses ----------------------------------

    @property
    @abc.abstractmethod
    def unit_key(self) -> Key:
        """Basis key of the unit."""

    @property
    @abc.abstractmethod
    def curvature(self) -> Vec:
        """The curvature element R as a key vector."""

    @abc.abstractmethod
    def degree(self, key: Key) -> int:
        """Degree of a basis key."""

    @abc.abstractmethod
    def _multiply_keys(self, left: Key, right: Key) -> Vec:
        """Product of two basis keys."""

    @abc.abstractmethod
    def _nabla_key(self, key: Key) -> Vec:
        """∇ of a basis key."""

    @abc.abstractmethod
    def sample_key(self, rng: np.random.Generator, degree: int | None = None) -> Key:
        """A random basis key, of the given degree if one is requested."""

    @property
    def max_sample_degree(self) -> int:
        return 3

    def describe_key(self, key: Key) -> str:
        return repr(key)

    def encode_key(self, key: Key) -> Any:
        """JSON-ready form of a basis key."""
        return key

    def decode_key(self, data: Any) -> Key:
        return data

    def factor_key(self, key: Key, rng: np.random.Generator) -> tuple[Key, Key]:
        """Two keys whose product is exactly ``key``; the trivial split by default."""
        return key, self.unit_key

    def expand(self, element: Any) -> Vec:
        """Key vector of a native element; key vectors pass through."""
        if isinstance(element, dict):
            return dict(element)
        raise InvalidElementError(f"{self.name} cannot expand {type(element).__name__}")

    def realize(self, vec: Mapping[Key, Fraction]) -> Any:
        return dict(vec)

    # -- derived structure --------------------------------------------------

    @property
    def unit(self) -> Vec:
        return {self.unit_key: Fraction(1)}

    @property
    def is_flat(self) -> bool:
        return not self.curvature

    def is_unit_key(self, key: Key) -> bool:
        return key == self.unit_key

    def multiply_keys(self, left: Key, right: Key) -> Vec:
        if left == self.unit_key:
            return {right: Fraction(1)}
        if right == self.unit_key:
            return {left: Fraction(1)}
        cached = self._product_cache.get((left, right))
        if cached is None:
            cached = self._multiply_keys(left, right)
            self._product_cache[(left, right)] = cached
        return cached

    def nabla_key(self, key: Key) -> Vec:
        cached = self._nabla_cache.get(key)
        if cached is None:
            cached = self._nabla_key(key)
            self._nabla_cache[key] = cached
        return cached

    def multiply(self, a: Mapping[Key, Fraction], b: Mapping[Key, Fraction]) -> Vec:
        out: dict = {}
        for k1, c1 in a.items():
            for k2, c2 in b.items():
                vec_accumulate(out, self.multiply_keys(k1, k2), c1 * c2)
        return out

    def nabla(self, a: Mapping[Key, Fraction]) -> Vec:
        out: dict = {}
        for key, coefficient in a.items():
            vec_accumulate(out, self.nabla_key(key), coefficient)
        return out

    def commutator(self, a: Mapping[Key, Fraction], b: Mapping[Key, Fraction]) -> Vec:
        """Graded commutator ``ab - (-1)^(|a||b|) ba`` extended over keys."""
        out: dict = {}
        for k1, c1 in a.items():
            for k2, c2 in b.items():
                sign = -1 if (self.degree(k1) * self.degree(k2)) % 2 == 0 else 1
                vec_accumulate(out, self.multiply_keys(k1, k2), c1 * c2)
                vec_accumulate(out, self.multiply_keys(k2, k1), sign * c1 * c2)
        return out

    def degree_of(self, a: Mapping[Key, Fraction]) -> int:
        """Degree of a homogeneous nonzero vector."""
        degrees = {self.degree(k) for k in a}
        if not degrees:
            raise InvalidElementError("the zero element has no degree")
        if len(degrees) > 1:
            raise InvalidElementError(f"element is inhomogeneous with degrees {sorted(degrees)}")
        return degrees.pop()

    def sample_element(
        self, rng: np.random.Generator, degree: int | None = None, terms: int = 3
    ) -> Vec:
        """A random homogeneous element with a few rational terms."""
        if degree is None:
            degree = int(rng.integers(0, self.max_sample_degree + 1))
        out: dict = {}
        for _ in range(terms):
            vec_accumulate(out, {self.sample_key(rng, degree): _random_fraction(rng)})
        if not out:
            out = {self.sample_key(rng, degree): Fraction(1)}
        return out

    def describe(self, a: Mapping[Key, Fraction]) -> str:
        if not a:
            return "0"
        return " + ".join(f"({c})*{self.describe_key(k)}" for k, c in a.items())


# ---------------------------------------------------------------------------
# Matrix-valued forms on ℝ^d
# ---------------------------------------------------------------------------

MatrixKey = Hashable
FormKey = tuple  # (generator subset, matrix key, exponent)


class MatrixFormCDGA(CurvedDGA):
    """``(Ω(ℝ^d, Mat_r), d + [A, −], dA + A∧A)`` on polynomial coefficients.

    Basis keys are ``(subset, matrix key, exponent)``. The matrix basis is the
    identity ``"I"`` together with the elementary matrices ``E_ij`` for every
    ``(i, j) != (r-1, r-1)``, so that the unit is a single key.
    """

    def __init__(
        self,
        dimension: int,
        rank: int,
        connection: FormElement,
        name: str = "matrix-forms",
        sample_poly_degree: int = 3,
    ) -> None:
        super().__init__()
        if (connection.dimension, connection.rank) != (dimension, rank):
            raise DimensionMismatchError(
                f"connection over (d={connection.dimension}, r={connection.rank}), "
                f"instance over (d={dimension}, r={rank})"
            )
        if not connection.is_zero() and connection.degrees() != {1}:
            raise InvalidConnectionError(
                f"connection must be homogeneous of degree 1, got degrees {sorted(connection.degrees())}"
            )
        self.dimension = dimension
        self.rank = rank
        self.connection = connection
        self.name = name
        self.commutative = rank == 1
        self.sample_poly_degree = sample_poly_degree
        self.matrix_keys: list[MatrixKey] = [UNIT_MATRIX_KEY] + [
            (i, j) for i in range(rank) for j in range(rank) if (i, j) != (rank - 1, rank - 1)
        ]
        self._matrix_product_cache: dict[tuple[MatrixKey, MatrixKey], dict] = {}
        self.curvature_form = exterior_derivative(connection) + wedge(connection, connection)
        self._curvature = self.expand(self.curvature_form)
        self.is_constant_connection = all(
            p.degree <= 0 for c in connection.terms.values() for row in c.entries for p in row
        )
        LOGGER.debug("built %s with %d curvature terms", name, len(self._curvature))

    # -- matrix basis -------------------------------------------------------

    def matrix_of_key(self, matrix_key: MatrixKey) -> list[list[Fraction]]:
        rows = [[Fraction(0)] * self.rank for _ in range(self.rank)]
        if matrix_key == UNIT_MATRIX_KEY:
            for i in range(self.rank):
                rows[i][i] = Fraction(1)
        else:
            i, j = matrix_key  # type: ignore[misc]
            rows[i][j] = Fraction(1)
        return rows

    def keys_of_matrix(self, rows: Sequence[Sequence[Fraction]]) -> dict[MatrixKey, Fraction]:
        """Coordinates of a constant matrix in the ``{I, E_ij}`` basis."""
        last = self.rank - 1
        corner = Fraction(rows[last][last])
        out: dict[MatrixKey, Fraction] = {}
        if corner:
            out[UNIT_MATRIX_KEY] = corner
        for i in range(self.rank):
            for j in range(self.rank):
                if (i, j) == (last, last):
                    continue
                value = Fraction(rows[i][j]) - (corner if i == j else 0)
                if value:
                    out[(i, j)] = value
        return out

    def _matrix_product(self, left: MatrixKey, right: MatrixKey) -> dict[MatrixKey, Fraction]:
        cached = self._matrix_product_cache.get((left, right))
        if cached is None:
            if left == UNIT_MATRIX_KEY:
                cached = {right: Fraction(1)}
            elif right == UNIT_MATRIX_KEY:
                cached = {left: Fraction(1)}
            else:
                (i, j), (k, l) = left, right  # type: ignore[misc]
                if j != k:
                    cached = {}
                elif (i, l) != (self.rank - 1, self.rank - 1):
                    cached = {(i, l): Fraction(1)}
                else:
                    cached = {UNIT_MATRIX_KEY: Fraction(1)}
                    for a in range(self.rank - 1):
                        cached[(a, a)] = Fraction(-1)
            self._matrix_product_cache[(left, right)] = cached
        return cached

    # -- CurvedDGA structure -------------------------------------------------

    @property
    def unit_key(self) -> Key:
        return ((), UNIT_MATRIX_KEY, (0,) * self.dimension)

    @property
    def curvature(self) -> Vec:
        return dict(self._curvature)

    def degree(self, key: Key) -> int:
        return len(key[0])  # type: ignore[index]

    def _multiply_keys(self, left: Key, right: Key) -> Vec:
        s1, m1, e1 = left  # type: ignore[misc]
        s2, m2, e2 = right  # type: ignore[misc]
        merged = _merge_generators(s1, s2)
        if merged is None:
            return {}
        sign, subset = merged
        exponent = tuple(a + b for a, b in zip(e1, e2))
        return {
            (subset, mk, exponent): sign * c for mk, c in self._matrix_product(m1, m2).items()
        }

    def _nabla_key(self, key: Key) -> Vec:
        form = self.realize({key: Fraction(1)})
        image = exterior_derivative(form) + graded_commutator(self.connection, form)
        return self.expand(image)

    @property
    def max_sample_degree(self) -> int:
        return self.dimension

    def sample_key(self, rng: np.random.Generator, degree: int | None = None) -> Key:
        if degree is None:
            degree = int(rng.integers(0, self.dimension + 1))
        if degree > self.dimension:
            raise InvalidElementError(f"no {degree}-forms on R^{self.dimension}")
        subset = tuple(sorted(rng.choice(self.dimension, size=degree, replace=False).tolist()))
        matrix_key = self.matrix_keys[int(rng.integers(0, len(self.matrix_keys)))]
        budget = int(rng.integers(0, self.sample_poly_degree + 1))
        exponent = [0] * self.dimension
        for _ in range(budget):
            exponent[int(rng.integers(0, self.dimension))] += 1
        return (subset, matrix_key, tuple(exponent))

    def describe_key(self, key: Key) -> str:
        subset, matrix_key, exponent = key  # type: ignore[misc]
        monomial = "*".join(f"x{i}^{e}" for i, e in enumerate(exponent) if e) or "1"
        generators = "^".join(f"dx{g}" for g in subset) or "1"
        matrix = "I" if matrix_key == UNIT_MATRIX_KEY else f"E{matrix_key[0]}{matrix_key[1]}"
        return f"{monomial}*{matrix}*{generators}"

    def encode_key(self, key: Key) -> Any:
        subset, matrix_key, exponent = key  # type: ignore[misc]
        return {
            "forms": list(subset),
            "matrix": matrix_key if matrix_key == UNIT_MATRIX_KEY else list(matrix_key),
            "exponent": list(exponent),
        }

    def decode_key(self, data: Any) -> Key:
        matrix = data.get("matrix", UNIT_MATRIX_KEY)
        matrix_key = UNIT_MATRIX_KEY if matrix == UNIT_MATRIX_KEY else tuple(matrix)
        if matrix_key not in self.matrix_keys:
            raise InvalidElementError(f"matrix key {matrix} is not in the basis for r={self.rank}")
        exponent = tuple(data.get("exponent", (0,) * self.dimension))
        subset = tuple(data.get("forms", ()))
        if len(exponent) != self.dimension or list(subset) != sorted(set(subset)):
            raise InvalidElementError(f"malformed form key {data}")
        return (subset, matrix_key, exponent)

    def factor_key(self, key: Key, rng: np.random.Generator) -> tuple[Key, Key]:
        """Split off part of the polynomial coefficient as a scalar 0-form on the right."""
        subset, matrix_key, exponent = key  # type: ignore[misc]
        right = tuple(int(rng.integers(0, e + 1)) for e in exponent)
        left = tuple(e - r for e, r in zip(exponent, right))
        return (subset, matrix_key, left), ((), UNIT_MATRIX_KEY, right)

    # -- conversion ---------------------------------------------------------

    def expand(self, element: Any) -> Vec:
        if isinstance(element, dict):
            return dict(element)
        if not isinstance(element, FormElement):
            raise InvalidElementError(f"{self.name} cannot expand {type(element).__name__}")
        if (element.dimension, element.rank) != (self.dimension, self.rank):
            raise DimensionMismatchError("form does not match the instance's (d, r)")
        out: dict = {}
        for subset, matrix in element.terms.items():
            exponents: set[Exponent] = set()
            for row in matrix.entries:
                for poly in row:
                    exponents.update(poly.terms)
            for exponent in exponents:
                rows = [
                    [Fraction(matrix.entries[i][j].terms.get(exponent, 0)) for j in range(self.rank)]
                    for i in range(self.rank)
                ]
                for mk, c in self.keys_of_matrix(rows).items():
                    vec_accumulate(out, {(subset, mk, exponent): c})
        return out

    def realize(self, vec: Mapping[Key, Fraction]) -> FormElement:
        total = FormElement.zero(self.dimension, self.rank)
        for (subset, matrix_key, exponent), coefficient in vec.items():
            poly = Polynomial.monomial(exponent, Fraction(coefficient))
            if matrix_key == UNIT_MATRIX_KEY:
                zero = Polynomial.zero(self.dimension)
                matrix = MatrixPoly(
                    self.rank,
                    tuple(
                        tuple(poly if i == j else zero for j in range(self.rank))
                        for i in range(self.rank)
                    ),
                )
            else:
                matrix = MatrixPoly.unit_matrix(self.rank, matrix_key[0], matrix_key[1], poly)
            total = total + FormElement(self.dimension, self.rank, {subset: matrix})
        return total

    def numeric_key(self, key: Key) -> tuple[Subset, np.ndarray, Exponent]:
        """Generator tuple, float matrix and exponent of a basis key."""
        subset, matrix_key, exponent = key  # type: ignore[misc]
        return subset, np.asarray(self.matrix_of_key(matrix_key), dtype=float), exponent

    # -- truncation windows -------------------------------------------------

    def window_basis(self, degree: int, cap: int) -> list[Key]:
        """All keys of form degree ``degree`` with polynomial degree at most ``cap``."""
        if degree < 0 or degree > self.dimension:
            return []
        exponents = sorted(
            e
            for e in itertools.product(range(cap + 1), repeat=self.dimension)
            if sum(e) <= cap
        )
        subsets = list(itertools.combinations(range(self.dimension), degree))
        return [
            (subset, mk, e)
            for subset in subsets
            for mk in self.matrix_keys
            for e in exponents
        ]


def make_matrix_form_cdga(
    dimension: int, rank: int, connection: FormElement | None = None, name: str | None = None
) -> MatrixFormCDGA:
    """Matrix-form curved DGA with ``∇ = d + [A, −]`` and ``R = dA + A∧A``.

    Raises:
        InvalidConnectionError: If ``connection`` is not homogeneous of degree 1.
    """
    if connection is None:
        connection = FormElement.zero(dimension, rank)
    label = name or ("flat-matrix-forms" if connection.is_zero() else "matrix-forms")
    return MatrixFormCDGA(dimension, rank, connection, name=label)


# ---------------------------------------------------------------------------
# Tensor algebra
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TensorElement:
    """A rational linear combination of words in a basis ``0..dv-1`` of V.

    Attributes:
        dv: Dimension of V.
        terms: Map from word (tuple of basis indices) to coefficient; the tensor
            degree of a word is its length.
    """

    dv: int
    terms: Mapping[tuple[int, ...], Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        cleaned = {}
        for word, coefficient in self.terms.items():
            if any(letter < 0 or letter >= self.dv for letter in word):
                raise InvalidElementError(f"word {word} uses letters outside 0..{self.dv - 1}")
            if coefficient != 0:
                cleaned[tuple(word)] = Fraction(coefficient)
        object.__setattr__(self, "terms", cleaned)

    @classmethod
    def zero(cls, dv: int) -> TensorElement:
        return cls(dv, {})

    @classmethod
    def unit(cls, dv: int) -> TensorElement:
        return cls(dv, {(): Fraction(1)})

    @classmethod
    def basis(cls, dv: int, letter: int) -> TensorElement:
        return cls(dv, {(letter,): Fraction(1)})

    @classmethod
    def from_vector(cls, coefficients: Sequence[Fraction | int]) -> TensorElement:
        return cls(len(coefficients), {(i,): Fraction(c) for i, c in enumerate(coefficients)})

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        degrees = {len(w) for w in self.terms}
        if not degrees:
            raise InvalidElementError("the zero tensor has no degree")
        if len(degrees) > 1:
            raise InvalidElementError(f"tensor is inhomogeneous with degrees {sorted(degrees)}")
        return degrees.pop()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TensorElement):
            return NotImplemented
        return self.dv == other.dv and dict(self.terms) == dict(other.terms)

    __hash__ = None  # type: ignore[assignment]

    def __add__(self, other: TensorElement) -> TensorElement:
        return TensorElement(self.dv, vec_add(self.terms, other.terms))

    def __sub__(self, other: TensorElement) -> TensorElement:
        return TensorElement(self.dv, vec_sub(self.terms, other.terms))

    def scale(self, factor: Fraction | int) -> TensorElement:
        return TensorElement(self.dv, vec_scale(self.terms, factor))

    def __mul__(self, other: TensorElement) -> TensorElement:
        if self.dv != other.dv:
            raise DimensionMismatchError(f"tensors over dim V = {self.dv} and {other.dv}")
        out: dict = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                vec_accumulate(out, {w1 + w2: c1 * c2})
        return TensorElement(self.dv, out)


class TensorCDGA(CurvedDGA):
    """``(T(V), [v, −], v ⊗ v)``; with ``v = 0`` this is ``(T(V), 0, 0)``."""

    def __init__(self, dv: int, v: TensorElement, name: str = "tensor-algebra") -> None:
        super().__init__()
        if v.dv != dv:
            raise DimensionMismatchError(f"v lives in dim {v.dv}, instance has dim V = {dv}")
        if not v.is_zero() and v.degree != 1:
            raise InvalidElementError(f"v must have degree 1, got {v.degree}")
        self.dv = dv
        self.v = v
        self.name = name
        self._curvature = dict((v * v).terms)

    @property
    def unit_key(self) -> Key:
        return ()

    @property
    def curvature(self) -> Vec:
        return dict(self._curvature)

    def degree(self, key: Key) -> int:
        return len(key)  # type: ignore[arg-type]

    def _multiply_keys(self, left: Key, right: Key) -> Vec:
        return {left + right: Fraction(1)}  # type: ignore[operator]

    def _nabla_key(self, key: Key) -> Vec:
        sign = 1 if len(key) % 2 else -1  # type: ignore[arg-type]
        out: dict = {}
        for (letter,), coefficient in self.v.terms.items():
            vec_accumulate(out, {(letter,) + key: coefficient})  # type: ignore[operator]
            vec_accumulate(out, {key + (letter,): sign * coefficient})  # type: ignore[operator]
        return out

    def sample_key(self, rng: np.random.Generator, degree: int | None = None) -> Key:
        if degree is None:
            degree = int(rng.integers(0, self.max_sample_degree + 1))
        return tuple(int(x) for x in rng.integers(0, self.dv, size=degree))

    def describe_key(self, key: Key) -> str:
        return "(x)".join(f"e{letter}" for letter in key) or "1"  # type: ignore[union-attr]

    def encode_key(self, key: Key) -> Any:
        return list(key)  # type: ignore[arg-type]

    def decode_key(self, data: Any) -> Key:
        word = tuple(int(letter) for letter in data)
        if any(letter < 0 or letter >= self.dv for letter in word):
            raise InvalidElementError(f"word {word} uses letters outside 0..{self.dv - 1}")
        return word

    def factor_key(self, key: Key, rng: np.random.Generator) -> tuple[Key, Key]:
        cut = int(rng.integers(0, len(key) + 1))  # type: ignore[arg-type]
        return key[:cut], key[cut:]  # type: ignore[index]

    def expand(self, element: Any) -> Vec:
        if isinstance(element, TensorElement):
            return dict(element.terms)
        return super().expand(element)

    def realize(self, vec: Mapping[Key, Fraction]) -> TensorElement:
        return TensorElement(self.dv, dict(vec))

    def window_basis(self, degree: int, cap: int | None = None) -> list[Key]:
        """All words of length ``degree``; the tensor grading makes each piece complete."""
        if degree < 0:
            return []
        return [tuple(w) for w in itertools.product(range(self.dv), repeat=degree)]


def make_tensor_algebra_cdga(dv: int, v: TensorElement, name: str | None = None) -> TensorCDGA:
    """Tensor-algebra curved DGA ``(T(V), [v, −], v ⊗ v)``.

    Raises:
        InvalidElementError: If ``v`` is nonzero and not of degree 1.
    """
    return TensorCDGA(dv, v, name=name or ("tensor-algebra" if not v.is_zero() else "tensor-algebra-flat"))


# ---------------------------------------------------------------------------
# Axiom checks
# ---------------------------------------------------------------------------


@dataclass
class AxiomResult:
    """Outcome of one axiom over all trials."""

    name: str
    passed: bool
    trials: int
    counterexample: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "trials": self.trials,
            "counterexample": self.counterexample,
        }


@dataclass
class AxiomReport:
    """Pass/fail of the curved DGA axioms on sampled elements."""

    instance: str
    results: list[AxiomResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def result(self, name: str) -> AxiomResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_dict(self) -> dict[str, Any]:
        return {
            "instance": self.instance,
            "passed": self.passed,
            "results": [r.to_dict() for r in self.results],
        }


def check_curved_dga_axioms(
    inst: CurvedDGA,
    sampler: Callable[[np.random.Generator], Vec] | None = None,
    trials: int = 100,
    seed: int = 0,
) -> AxiomReport:
    """Check Leibniz, ``∇² = [R, −]``, Bianchi, linearity and ``∇1 = 0``.

    Args:
        inst: The instance under test.
        sampler: Draws a homogeneous element; defaults to ``inst.sample_element``.
        trials: Number of sampled elements (pairs for Leibniz and linearity).
        seed: Seed for ``numpy.random.default_rng``.

    Returns:
        An AxiomReport with the first counterexample of every failing axiom.
    """
    rng = np.random.default_rng(seed)
    draw = sampler or (lambda g: inst.sample_element(g))
    failures: dict[str, str | None] = {
        "leibniz": None,
        "curvature_square": None,
        "linearity": None,
    }
    curvature = inst.curvature
    for _ in range(trials):
        a, b = draw(rng), draw(rng)
        if failures["leibniz"] is None and a:
            sign = -1 if inst.degree_of(a) % 2 else 1
            lhs = inst.nabla(inst.multiply(a, b))
            rhs = vec_add(inst.multiply(inst.nabla(a), b), inst.multiply(a, inst.nabla(b)), sign)
            if lhs != rhs:
                failures["leibniz"] = f"a={inst.describe(a)}; b={inst.describe(b)}"
        if failures["curvature_square"] is None:
            if inst.nabla(inst.nabla(a)) != inst.commutator(curvature, a):
                failures["curvature_square"] = f"a={inst.describe(a)}"
        if failures["linearity"] is None:
            factor = _random_fraction(rng)
            lhs = inst.nabla(vec_add(a, b, factor))
            rhs = vec_add(inst.nabla(a), inst.nabla(b), factor)
            if lhs != rhs:
                failures["linearity"] = f"a={inst.describe(a)}; b={inst.describe(b)}"
    bianchi = inst.nabla(curvature)
    unit = inst.nabla(inst.unit)
    results = [
        AxiomResult(name, failures[name] is None, trials, failures[name])
        for name in ("leibniz", "curvature_square", "linearity")
    ]
    results.append(AxiomResult("bianchi", not bianchi, 1, None if not bianchi else inst.describe(bianchi)))
    results.append(AxiomResult("unit", not unit, 1, None if not unit else inst.describe(unit)))
    report = AxiomReport(inst.name, results)
    LOGGER.info("axioms on %s: %s", inst.name, "pass" if report.passed else "FAIL")
    return report


# ---------------------------------------------------------------------------
# Morphisms
# ---------------------------------------------------------------------------


@dataclass
class DGAMorphismWitness:
    """A candidate morphism, given on basis keys, with a finite test set.

    Attributes:
        source: Domain instance.
        target: Codomain instance.
        mapping: Image of a source basis key as a target key vector.
        test_keys: Source keys on which the conditions are checked.
        name: Label used in reports.
    """

    source: CurvedDGA
    target: CurvedDGA
    mapping: Callable[[Key], Vec]
    test_keys: list[Key]
    name: str = "morphism"

    def apply(self, a: Mapping[Key, Fraction]) -> Vec:
        out: dict = {}
        for key, coefficient in a.items():
            vec_accumulate(out, self.mapping(key), coefficient)
        return out


def morphism_failures(w: DGAMorphismWitness) -> list[str]:
    """Names of the morphism conditions that fail on the witness's test set."""
    failures: list[str] = []
    src, tgt = w.source, w.target
    for key in w.test_keys:
        image = w.apply({key: Fraction(1)})
        if any(tgt.degree(k) != src.degree(key) for k in image):
            failures.append("degree")
            break
    if w.apply(src.unit) != tgt.unit:
        failures.append("unit")
    for k1, k2 in itertools.product(w.test_keys, repeat=2):
        lhs = w.apply(src.multiply_keys(k1, k2))
        rhs = tgt.multiply(w.apply({k1: Fraction(1)}), w.apply({k2: Fraction(1)}))
        if lhs != rhs:
            failures.append("multiplicative")
            break
    if w.apply(src.curvature) != tgt.curvature:
        failures.append("curvature")
    for key in w.test_keys:
        if tgt.nabla(w.apply({key: Fraction(1)})) != w.apply(src.nabla_key(key)):
            failures.append("differential")
            break
    return failures


def check_morphism(w: DGAMorphismWitness) -> bool:
    """True iff degree, unit, product, curvature and differential conditions hold."""
    failures = morphism_failures(w)
    if failures:
        LOGGER.info("%s is not a morphism: %s", w.name, ", ".join(failures))
    return not failures


# ---------------------------------------------------------------------------
# Named fixtures
# ---------------------------------------------------------------------------


def example_connection() -> FormElement:
    """``A = [[0, 1], [-1, 0]] dx + [[0, 1], [1, 0]] dy`` on ℝ² with rank-2 fibers."""
    return FormElement.constant([[0, 1], [-1, 0]], (0,), 2) + FormElement.constant(
        [[0, 1], [1, 0]], (1,), 2
    )


def example_curved_closed_form() -> FormElement:
    """``[[0, 0], [1, 0]] (dx + dy)``: curved-closed but not exact for the example connection."""
    return FormElement.constant([[0, 0], [1, 0]], (0,), 2) + FormElement.constant(
        [[0, 0], [1, 0]], (1,), 2
    )


def identity_witness(inst: CurvedDGA, test_keys: Iterable[Key]) -> DGAMorphismWitness:
    return DGAMorphismWitness(
        inst, inst, lambda key: {key: Fraction(1)}, list(test_keys), name=f"id[{inst.name}]"
    )


def perturbation_witness(dv: int = 2, letter: int = 0) -> DGAMorphismWitness:
    """Identity of T(V) from ``(T(V), [v, −], v ⊗ v)`` to ``(T(V), 0, 0)``: not a morphism."""
    v = TensorElement.basis(dv, letter)
    source = make_tensor_algebra_cdga(dv, v)
    target = make_tensor_algebra_cdga(dv, TensorElement.zero(dv))
    test_keys = [w for degree in range(3) for w in source.window_basis(degree)]
    return DGAMorphismWitness(
        source, target, lambda key: {key: Fraction(1)}, test_keys, name="perturbation"
    )


def scalar_inclusion_witness(dimension: int = 2, rank: int = 2, seed: int = 0, samples: int = 12) -> DGAMorphismWitness:
    """``ω ↦ ω·I`` from scalar forms into flat ``Mat_r``-valued forms."""
    source = make_matrix_form_cdga(dimension, 1, name="scalar-forms")
    target = make_matrix_form_cdga(dimension, rank, name="flat-matrix-forms")
    rng = np.random.default_rng(seed)
    test_keys = sorted({source.sample_key(rng) for _ in range(samples)} | {source.unit_key}, key=repr)
    return DGAMorphismWitness(
        source, target, lambda key: {key: Fraction(1)}, test_keys, name="scalar-inclusion"
    )
