"""Tests for the matrix-form and tensor-algebra curved DGAs."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from core.curved_dga import (
    TensorElement,
    check_curved_dga_axioms,
    check_morphism,
    example_connection,
    identity_witness,
    make_matrix_form_cdga,
    make_tensor_algebra_cdga,
    morphism_failures,
    perturbation_witness,
    scalar_inclusion_witness,
)
from core.errors import DimensionMismatchError, InvalidConnectionError, InvalidElementError
from core.graded import FormElement


@pytest.fixture()
def curved_matrix():
    return make_matrix_form_cdga(2, 2, example_connection())


@pytest.fixture()
def curved_tensor():
    return make_tensor_algebra_cdga(2, TensorElement.basis(2, 0))


class TestMatrixFormCDGA:
    """``(Ω(ℝ^d, Mat_r), d + [A, −], dA + A∧A)``."""

    def test_example_curvature(self, curved_matrix) -> None:
        expected = curved_matrix.expand(FormElement.constant([[2, 0], [0, -2]], (0, 1), 2))
        assert curved_matrix.curvature == expected
        assert not curved_matrix.is_flat
        assert curved_matrix.is_constant_connection

    def test_flat_instance(self) -> None:
        inst = make_matrix_form_cdga(2, 2)
        assert inst.is_flat
        assert inst.name == "flat-matrix-forms"

    def test_scalar_forms_are_commutative(self) -> None:
        assert make_matrix_form_cdga(2, 1).commutative
        assert not make_matrix_form_cdga(2, 2).commutative

    def test_axioms_hold(self, curved_matrix) -> None:
        report = check_curved_dga_axioms(curved_matrix, trials=15, seed=3)
        assert report.passed, report.to_dict()

    def test_nabla_of_unit_vanishes(self, curved_matrix) -> None:
        assert curved_matrix.nabla(curved_matrix.unit) == {}

    def test_expand_realize_agree(self, curved_matrix) -> None:
        omega = example_connection()
        assert curved_matrix.realize(curved_matrix.expand(omega)) == omega

    def test_rejects_zero_form_connection(self) -> None:
        with pytest.raises(InvalidConnectionError):
            make_matrix_form_cdga(2, 2, FormElement.unit(2, 2))

    def test_rejects_mismatched_connection(self) -> None:
        with pytest.raises(DimensionMismatchError):
            make_matrix_form_cdga(3, 2, example_connection())

    def test_factor_key_recovers_key(self, curved_matrix) -> None:
        rng = np.random.default_rng(5)
        for _ in range(10):
            key = curved_matrix.sample_key(rng)
            left, right = curved_matrix.factor_key(key, rng)
            assert curved_matrix.multiply_keys(left, right) == {key: Fraction(1)}

    def test_decode_rejects_unknown_matrix_key(self, curved_matrix) -> None:
        with pytest.raises(InvalidElementError):
            curved_matrix.decode_key({"forms": [0], "matrix": [1, 1], "exponent": [0, 0]})

    def test_window_basis_counts(self) -> None:
        inst = make_matrix_form_cdga(2, 1)
        # monomials of degree <= 2 in two variables: 6
        assert len(inst.window_basis(0, 2)) == 6
        assert len(inst.window_basis(1, 2)) == 12
        assert inst.window_basis(3, 2) == []


class TestTensorCDGA:
    """``(T(V), [v, −], v ⊗ v)``."""

    def test_curvature_is_v_squared(self, curved_tensor) -> None:
        assert curved_tensor.curvature == {(0, 0): Fraction(1)}

    def test_nabla_is_graded_commutator_with_v(self, curved_tensor) -> None:
        assert curved_tensor.nabla_key((1,)) == {(0, 1): Fraction(1), (1, 0): Fraction(1)}
        assert curved_tensor.nabla_key((1, 1)) == {(0, 1, 1): Fraction(1), (1, 1, 0): Fraction(-1)}
        assert curved_tensor.nabla_key(()) == {}

    def test_axioms_hold(self, curved_tensor) -> None:
        assert check_curved_dga_axioms(curved_tensor, trials=30, seed=1).passed

    def test_flat_tensor_algebra(self) -> None:
        inst = make_tensor_algebra_cdga(3, TensorElement.zero(3))
        assert inst.is_flat
        assert inst.nabla_key((0, 1)) == {}

    def test_rejects_v_of_wrong_degree(self) -> None:
        with pytest.raises(InvalidElementError):
            make_tensor_algebra_cdga(2, TensorElement(2, {(0, 1): Fraction(1)}))

    def test_rejects_v_of_wrong_dimension(self) -> None:
        with pytest.raises(DimensionMismatchError):
            make_tensor_algebra_cdga(3, TensorElement.basis(2, 0))

    def test_degree_of_inhomogeneous_raises(self, curved_tensor) -> None:
        with pytest.raises(InvalidElementError):
            curved_tensor.degree_of({(0,): Fraction(1), (0, 1): Fraction(1)})

    def test_window_basis(self, curved_tensor) -> None:
        assert len(curved_tensor.window_basis(3)) == 8


class TestMorphisms:
    """Morphism witnesses."""

    def test_identity_is_a_morphism(self, curved_tensor) -> None:
        keys = [w for degree in range(3) for w in curved_tensor.window_basis(degree)]
        assert check_morphism(identity_witness(curved_tensor, keys))

    def test_scalar_inclusion_is_a_morphism(self) -> None:
        assert check_morphism(scalar_inclusion_witness(samples=6))

    def test_perturbation_is_rejected(self) -> None:
        failures = morphism_failures(perturbation_witness())
        assert "curvature" in failures
        assert "differential" in failures
        assert "unit" not in failures
