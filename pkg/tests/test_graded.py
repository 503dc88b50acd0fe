"""Tests for polynomial forms, Koszul signs and shuffles."""

from __future__ import annotations

from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.curved_dga import example_connection, make_matrix_form_cdga
from core.errors import DimensionMismatchError, InvalidElementError
from core.graded import (
    FormElement,
    MatrixPoly,
    Polynomial,
    Shuffle,
    enumerate_shuffles,
    exterior_derivative,
    graded_commutator,
    inversion_count,
    koszul_sign,
    wedge,
)


def _dx(i: int, dimension: int = 2, rank: int = 1) -> FormElement:
    return FormElement(dimension, rank, {(i,): MatrixPoly.identity(rank, dimension)})


def _x(i: int, dimension: int = 2) -> Polynomial:
    return Polynomial.variable(i, dimension)


class TestSigns:
    """Inversion counts and Koszul signs."""

    def test_inversion_count(self) -> None:
        assert inversion_count([1, 2, 3]) == 0
        assert inversion_count([2, 1, 3]) == 1
        assert inversion_count([3, 2, 1]) == 3

    def test_swapping_two_odd_objects_is_negative(self) -> None:
        assert koszul_sign([1, 1], [1, 0]) == -1

    def test_swapping_with_an_even_object_is_positive(self) -> None:
        assert koszul_sign([1, 2], [1, 0]) == 1
        assert koszul_sign([0, 0], [1, 0]) == 1

    def test_identity_order_is_positive(self) -> None:
        assert koszul_sign([1, 1, 1], [0, 1, 2]) == 1


class TestPolynomial:
    """Exact polynomial arithmetic."""

    def test_zero_has_degree_minus_one(self) -> None:
        assert Polynomial.zero(2).degree == -1
        assert Polynomial.zero(2).is_zero()

    def test_product_and_degree(self) -> None:
        p = (_x(0) + _x(1)) * (_x(0) - _x(1))
        assert p == Polynomial.monomial((2, 0)) - Polynomial.monomial((0, 2))
        assert p.degree == 2

    def test_derivative(self) -> None:
        p = Polynomial.monomial((3, 1), Fraction(2))
        assert p.derivative(0) == Polynomial.monomial((2, 1), Fraction(6))
        assert p.derivative(1) == Polynomial.monomial((3, 0), Fraction(2))

    def test_integrate_unit_interval(self) -> None:
        p = Polynomial.monomial((2, 1))
        assert p.integrate_unit_interval(0) == Polynomial.monomial((0, 1), Fraction(1, 3))

    def test_substitute(self) -> None:
        p = Polynomial.monomial((2, 1))
        assert p.substitute(0, Fraction(1, 2)) == Polynomial.monomial((0, 1), Fraction(1, 4))

    def test_evaluate_array_matches_exact(self) -> None:
        p = Polynomial.monomial((1, 2), Fraction(3)) + Polynomial.constant(Fraction(1), 2)
        points = np.array([[0.5, 2.0], [1.0, -1.0]])
        assert np.allclose(p.evaluate_array(points), [7.0, 4.0])
        assert p.evaluate([Fraction(1, 2), Fraction(2)]) == 7

    def test_mismatched_exponent_rejected(self) -> None:
        with pytest.raises(DimensionMismatchError):
            Polynomial(2, {(1,): Fraction(1)})


class TestForms:
    """Wedge, exterior derivative and graded commutator."""

    def test_wedge_anticommutes_on_one_forms(self) -> None:
        assert wedge(_dx(0), _dx(1)) == -wedge(_dx(1), _dx(0))
        assert wedge(_dx(0), _dx(0)).is_zero()

    def test_exterior_derivative_of_x_dy(self) -> None:
        form = FormElement(2, 1, {(1,): MatrixPoly.unit_matrix(1, 0, 0, _x(0))})
        assert exterior_derivative(form) == wedge(_dx(0), _dx(1))

    def test_unordered_generators_pick_up_a_sign(self) -> None:
        coefficient = MatrixPoly.identity(1, 2)
        assert FormElement.from_terms(2, 1, [((1, 0), coefficient)]) == -wedge(_dx(0), _dx(1))

    def test_non_increasing_subset_rejected(self) -> None:
        with pytest.raises(InvalidElementError):
            FormElement(2, 1, {(1, 0): MatrixPoly.identity(1, 2)})

    def test_example_connection_squares_to_constant_curvature(self) -> None:
        a = example_connection()
        assert wedge(a, a) == FormElement.constant([[2, 0], [0, -2]], (0, 1), 2)
        assert exterior_derivative(a).is_zero()

    def test_commutator_of_scalar_one_forms_vanishes(self) -> None:
        assert graded_commutator(_dx(0), _dx(1)).is_zero()

    def test_restrict_and_drop_leading_coordinate(self) -> None:
        form = FormElement(2, 1, {(1,): MatrixPoly.unit_matrix(1, 0, 0, _x(0) * _x(1))})
        restricted = form.restrict(0, Fraction(2))
        dropped = restricted.drop_leading_coordinate()
        assert dropped.dimension == 1
        assert dropped == FormElement(1, 1, {(0,): MatrixPoly.unit_matrix(1, 0, 0, Polynomial.variable(0, 1).scale(2))})

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=10_000))
    def test_d_squared_vanishes(self, seed: int) -> None:
        inst = make_matrix_form_cdga(3, 2)
        rng = np.random.default_rng(seed)
        form = inst.realize(inst.sample_element(rng))
        assert exterior_derivative(exterior_derivative(form)).is_zero()

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=10_000))
    def test_d_is_a_graded_derivation(self, seed: int) -> None:
        inst = make_matrix_form_cdga(2, 2)
        rng = np.random.default_rng(seed)
        a = inst.realize(inst.sample_element(rng, degree=1))
        b = inst.realize(inst.sample_element(rng))
        lhs = exterior_derivative(wedge(a, b))
        rhs = wedge(exterior_derivative(a), b) - wedge(a, exterior_derivative(b))
        assert lhs == rhs


class TestShuffles:
    """Shuffle enumeration and the reversed zag shuffle."""

    @pytest.mark.parametrize(("n", "m"), [(0, 0), (1, 1), (2, 1), (2, 2), (3, 2)])
    def test_count_is_binomial(self, n: int, m: int) -> None:
        assert len(enumerate_shuffles(n, m)) == comb(n + m, n)

    def test_lexicographic_order(self) -> None:
        images = [s.image for s in enumerate_shuffles(1, 2)]
        assert images == [(1, 2, 3), (2, 1, 3), (3, 1, 2)]

    def test_sign_counts_inversions(self) -> None:
        assert Shuffle(1, 2, (3, 1, 2)).sign == 1
        assert Shuffle(1, 2, (2, 1, 3)).sign == -1

    def test_reversed_shuffle(self) -> None:
        s = Shuffle(1, 1, (1, 2))
        assert s.sigma_sh() == (2, 1)
        assert s.sh_sign == -1
        assert Shuffle(1, 1, (2, 1)).sigma_sh() == (1, 2)

    def test_reversed_shuffle_is_a_shuffle(self) -> None:
        for s in enumerate_shuffles(2, 2):
            Shuffle(2, 2, s.sigma_sh())

    def test_non_shuffle_rejected(self) -> None:
        with pytest.raises(InvalidElementError):
            Shuffle(2, 1, (2, 1, 3))
