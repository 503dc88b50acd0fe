"""Tests for the two-sided bar complex and the column collapse."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from core.bar import (
    BarMonomial,
    bar_degree,
    bar_differential,
    bar_shuffle,
    col_collapse,
    require_commutative_flat,
    sample_bar_monomial,
)
from core.curved_dga import UNIT_MATRIX_KEY, example_connection, make_matrix_form_cdga
from core.errors import InvalidElementError, UnsupportedCarrierError
from core.graded import FormElement, MatrixPoly, Polynomial
from core.linear import vec_add
from core.zigzag import ZigzagAlgebra, ZigzagMonomial


def _key(subset: tuple[int, ...], exponent: tuple[int, int]) -> tuple:
    return (subset, UNIT_MATRIX_KEY, exponent)


ONE = _key((), (0, 0))
X0 = _key((), (1, 0))
X1 = _key((), (0, 1))
DX0 = _key((0,), (0, 0))


@pytest.fixture()
def scalar():
    return make_matrix_form_cdga(2, 1, name="scalar-forms")


class TestCarrierGuard:
    """The bar complex needs a commutative flat carrier."""

    def test_matrix_valued_forms_rejected(self) -> None:
        with pytest.raises(UnsupportedCarrierError):
            require_commutative_flat(make_matrix_form_cdga(2, 2, example_connection()))

    def test_curved_scalar_forms_rejected(self) -> None:
        connection = FormElement(2, 1, {(1,): MatrixPoly.unit_matrix(1, 0, 0, Polynomial.variable(0, 2))})
        curved = make_matrix_form_cdga(2, 1, connection)
        with pytest.raises(UnsupportedCarrierError):
            bar_differential(curved, BarMonomial((ONE, ONE)))

    def test_bar_monomial_needs_endpoints(self) -> None:
        with pytest.raises(InvalidElementError):
            BarMonomial((ONE,))


class TestBarDifferential:
    """Slotwise d plus adjacent merges."""

    def test_one_interior_slot(self, scalar) -> None:
        x = BarMonomial((ONE, X0, ONE))
        assert bar_differential(scalar, x) == {
            BarMonomial((ONE, DX0, ONE)): Fraction(-1),
            BarMonomial((X0, ONE)): Fraction(-1),
            BarMonomial((ONE, X0)): Fraction(1),
        }

    def test_degree(self, scalar) -> None:
        assert bar_degree(scalar, BarMonomial((ONE, DX0, DX0, ONE))) == 0

    def test_squares_to_zero(self, scalar) -> None:
        rng = np.random.default_rng(0)
        for _ in range(20):
            x = sample_bar_monomial(scalar, rng, int(rng.integers(0, 3)))
            assert bar_differential(scalar, bar_differential(scalar, x)) == {}

    def test_leibniz_over_shuffle(self, scalar) -> None:
        rng = np.random.default_rng(1)
        for _ in range(10):
            x = sample_bar_monomial(scalar, rng, int(rng.integers(0, 2)))
            y = sample_bar_monomial(scalar, rng, int(rng.integers(0, 2)))
            sign = -1 if bar_degree(scalar, x) % 2 else 1
            lhs = bar_differential(scalar, bar_shuffle(scalar, x, y))
            rhs = vec_add(
                bar_shuffle(scalar, bar_differential(scalar, x), y),
                bar_shuffle(scalar, x, bar_differential(scalar, y)),
                sign,
            )
            assert lhs == rhs


class TestBarShuffle:
    """Interiors interleave and endpoints multiply."""

    def test_endpoints_multiply(self, scalar) -> None:
        assert bar_shuffle(scalar, BarMonomial((X0, ONE)), BarMonomial((X1, X0))) == {
            BarMonomial((_key((), (1, 1)), X0)): Fraction(1)
        }

    def test_interleavings(self, scalar) -> None:
        # [x0] has degree -1, so the two interleavings differ by a sign
        product = bar_shuffle(scalar, BarMonomial((ONE, X0, ONE)), BarMonomial((ONE, X1, ONE)))
        assert product == {
            BarMonomial((ONE, X0, X1, ONE)): Fraction(-1),
            BarMonomial((ONE, X1, X0, ONE)): Fraction(1),
        }


class TestColumnCollapse:
    """Col: ZZ(A) → B(A, A, A)."""

    def test_collapse_multiplies_each_column(self, scalar) -> None:
        m = ZigzagMonomial(2, 0, (X0, X1, X0))
        assert col_collapse(scalar, m) == {BarMonomial((_key((), (2, 0)), X1)): Fraction(1)}

    def test_collapse_of_unit(self, scalar) -> None:
        zz = ZigzagAlgebra(scalar)
        assert col_collapse(scalar, zz.unit) == {BarMonomial((ONE, ONE)): Fraction(1)}

    def test_chain_map(self, scalar) -> None:
        zz = ZigzagAlgebra(scalar, sample_rows=(2,), sample_columns=(0, 1), entry_degree_cap=1)
        rng = np.random.default_rng(2)
        for _ in range(10):
            x = zz.sample_element(rng)
            assert col_collapse(scalar, zz.D_z(x)) == bar_differential(scalar, col_collapse(scalar, x))

    def test_algebra_map(self, scalar) -> None:
        zz = ZigzagAlgebra(scalar, sample_rows=(2,), sample_columns=(0, 1), entry_degree_cap=1)
        rng = np.random.default_rng(3)
        for _ in range(5):
            x, y = zz.sample_element(rng), zz.sample_element(rng)
            lhs = col_collapse(scalar, zz.shuffle(x, y))
            rhs = bar_shuffle(scalar, col_collapse(scalar, x), col_collapse(scalar, y))
            assert lhs == rhs
