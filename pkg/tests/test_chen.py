"""Tests for the numeric Chen map It on zigzags of matrix forms."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from core.chen import (
    ChenEvaluator,
    NumericCheck,
    PathSpaceFormEvaluator,
    alternation_check,
    boundary_term_check,
    check_algebra_map,
    check_chain_map,
    convergence_gate,
    ev0_pullback,
    ev0_triangle_check,
    quotient_invariance_check,
    refinement_check,
    relative_gap,
    shrink_homotopy_check,
    triangle_check,
    wedge_sign_table,
)
from core.curved_dga import (
    UNIT_MATRIX_KEY,
    TensorElement,
    example_connection,
    make_matrix_form_cdga,
    make_tensor_algebra_cdga,
)
from core.errors import ArityError, UnsupportedCarrierError
from core.transport import CirclePath, LinePath, PolynomialField, PolynomialPath
from core.zigzag import ZigzagAlgebra, ZigzagMonomial

STEP = 2e-3

U = ((), UNIT_MATRIX_KEY, (0, 0))
DX0 = ((0,), UNIT_MATRIX_KEY, (0, 0))
DX1 = ((1,), UNIT_MATRIX_KEY, (0, 0))
X0_DX0 = ((0,), UNIT_MATRIX_KEY, (1, 0))
# E01 dx and x E10 dy on the rank-2 carrier
A = ((0,), (0, 1), (0, 0))
B = ((1,), (1, 0), (1, 0))


def _evaluator(carrier) -> ChenEvaluator:
    zz = ZigzagAlgebra(carrier, sample_rows=(2,), sample_columns=(0, 1), entry_degree_cap=1)
    return ChenEvaluator(carrier, step=STEP, order=8, h=1e-4, zigzag=zz)


@pytest.fixture()
def curved() -> ChenEvaluator:
    return _evaluator(make_matrix_form_cdga(2, 2, example_connection()))


@pytest.fixture()
def scalar() -> ChenEvaluator:
    return _evaluator(make_matrix_form_cdga(2, 1))


@pytest.fixture()
def segment() -> LinePath:
    return LinePath((0.0, 0.0), (0.6, -0.3))


@pytest.fixture()
def arc() -> CirclePath:
    return CirclePath((0.2, 0.1), radius=0.6, start_angle=0.4, sweep=1.5)


def _field(*rows: tuple[float, float]) -> PolynomialField:
    return PolynomialField(tuple(rows))


class TestWedgeSignTable:
    """Signs of the exterior algebra on bit masks."""

    def test_two_generators(self) -> None:
        table = wedge_sign_table(2)
        assert table[0b01, 0b10] == 1
        assert table[0b10, 0b01] == -1
        assert table[0b01, 0b01] == 0
        assert table[0, 0b11] == 1


class TestClassicalIntegrals:
    """Flat scalar forms reduce to ordinary iterated integrals."""

    def test_single_column(self, scalar, segment) -> None:
        m = ZigzagMonomial(2, 1, (U, DX0, U, U, U))
        assert scalar.evaluate_monomial(m, segment, []) == pytest.approx(np.asarray([[0.6]]))

    def test_polynomial_coefficient(self, scalar, segment) -> None:
        m = ZigzagMonomial(2, 1, (U, X0_DX0, U, U, U))
        assert scalar.evaluate_monomial(m, segment, []) == pytest.approx(np.asarray([[0.18]]))

    def test_two_ordered_columns(self, scalar, segment) -> None:
        m = ZigzagMonomial(2, 2, (U, DX0, DX1, U, U, U, U))
        assert scalar.evaluate_monomial(m, segment, []) == pytest.approx(np.asarray([[-0.09]]))

    def test_collapse_matches_classical_chen_integral(self, scalar, arc) -> None:
        m = ZigzagMonomial(2, 2, (U, DX0, DX1, U, U, DX1, U))
        check = triangle_check(scalar, scalar.zigzag.normalize(m), arc, [_field((0.3, -0.2))])
        assert check.passed, check.to_dict()


class TestEvaluatorContract:
    """Carrier and arity guards."""

    def test_unit_evaluates_to_identity(self, curved, arc) -> None:
        assert np.allclose(curved.evaluate_It(curved.zigzag.unit, arc, []), np.eye(2))

    def test_arity_mismatch(self, curved, arc) -> None:
        m = ZigzagMonomial(2, 1, (U, A, U, U, U))
        with pytest.raises(ArityError):
            curved.evaluate_monomial(m, arc, [_field((1.0, 0.0))])

    def test_form_evaluator_checks_arity(self, arc) -> None:
        form = PathSpaceFormEvaluator(1, lambda path, fields: np.eye(1), "one")
        with pytest.raises(ArityError):
            form(arc, [])

    def test_mixed_degrees_have_no_form(self, curved) -> None:
        x = {ZigzagMonomial(2, 1, (U, A, U, U, U)): Fraction(1), ZigzagMonomial(2, 0, (U, A, U)): Fraction(1)}
        with pytest.raises(ArityError):
            curved.as_form(x)

    def test_tensor_carrier_rejected(self) -> None:
        with pytest.raises(UnsupportedCarrierError):
            ChenEvaluator(make_tensor_algebra_cdga(2, TensorElement.basis(2, 0)))

    def test_scalar_bar_integral_needs_flat_scalar_carrier(self, curved, arc) -> None:
        with pytest.raises(UnsupportedCarrierError):
            triangle_check(curved, curved.zigzag.unit, arc, [])

    def test_relative_gap_scales_large_values(self) -> None:
        assert relative_gap(np.asarray([100.0]), np.asarray([101.0])) == pytest.approx(1 / 101)
        assert relative_gap(np.zeros(2), np.asarray([0.5, 0.0])) == pytest.approx(0.5)


class TestEndpointForms:
    """``It(η(ω)) = ev₀^*ω``."""

    def test_one_form(self, curved, arc) -> None:
        omega = {A: Fraction(1), B: Fraction(-2)}
        check = ev0_triangle_check(curved, omega, arc, [_field((0.5, 1.0), (0.2, 0.0))])
        assert check.passed, check.to_dict()

    def test_pullback_reads_fields_at_time_zero(self, curved, segment) -> None:
        value = ev0_pullback(curved.carrier, {A: Fraction(1)})(segment, [_field((2.0, 5.0), (1.0, 1.0))])
        assert np.allclose(value, [[0.0, 2.0], [0.0, 0.0]])

    def test_two_form_alternates(self, curved, arc) -> None:
        x = curved.zigzag.eta({((0, 1), (0, 1), (1, 0)): Fraction(1)})
        fields = [_field((1.0, 0.0), (0.0, 1.0)), _field((0.2, 0.7))]
        check = alternation_check(curved, x, arc, fields)
        assert check.passed, check.to_dict()
        assert abs(curved.evaluate_It(x, arc, fields)).max() > 0


class TestDifferentialIdentities:
    """It intertwines D_z with the covariant path-space derivative."""

    def test_chain_map_on_curved_carrier(self, curved, arc) -> None:
        m = ZigzagMonomial(2, 1, (U, A, U, U, U))
        x = curved.zigzag.normalize(m)
        assert curved.zigzag.c_z(x)
        check = check_chain_map(curved, x, arc, [_field((0.4, -0.3), (0.1, 0.2))])
        assert check.passed, check.to_dict()

    def test_chain_map_on_endpoint_form(self, curved) -> None:
        path = PolynomialPath(((0.1, 0.0), (0.5, 0.4), (-0.2, 0.3)))
        x = curved.zigzag.eta({((), (0, 1), (1, 0)): Fraction(1)})
        check = check_chain_map(curved, x, path, [_field((0.0, 1.0))])
        assert check.passed, check.to_dict()

    def test_boundary_term_matches_faces(self, curved, arc) -> None:
        m = ZigzagMonomial(2, 1, (U, A, U, U, U))
        check = boundary_term_check(curved, m, arc, [_field((0.3, 0.3), (0.0, -0.5))])
        assert check.passed, check.to_dict()
        assert check.details["faces"] == 2

    def test_shrink_homotopy(self, curved, segment) -> None:
        m = ZigzagMonomial(2, 1, (U, A, U, B, U))
        x = curved.zigzag.normalize(m)
        check = shrink_homotopy_check(curved, x, segment, [_field((0.2, 0.1))], s_order=8)
        assert check.passed, check.to_dict()

    def test_shrink_homotopy_needs_positive_degree(self, curved, arc) -> None:
        with pytest.raises(ArityError):
            shrink_homotopy_check(curved, curved.zigzag.unit, arc, [])


class TestProductAndQuotient:
    """Multiplicativity and independence of representatives."""

    def test_algebra_map_on_scalar_carrier(self, scalar, arc) -> None:
        x = ZigzagMonomial(2, 1, (U, DX0, U, U, U))
        y = scalar.zigzag.eta({DX1: Fraction(1)})
        check = check_algebra_map(scalar, scalar.zigzag.normalize(x), y, arc, [_field((0.5, -0.4), (0.1, 0.0))])
        assert check.passed, check.to_dict()

    def test_unit_rows_do_not_change_the_integral(self, curved, arc) -> None:
        m = ZigzagMonomial(2, 1, (U, A, U, B, U))
        for j in range(3):
            raw = curved.zigzag.insert_units(m, j)
            check = quotient_invariance_check(curved, raw, arc, [_field((0.1, 0.9))])
            assert check.passed, check.to_dict()

    def test_convergence_gate(self, curved, arc) -> None:
        m = ZigzagMonomial(2, 1, (U, A, U, U, U))
        check = convergence_gate(curved, m, arc, [], tolerance=1e-6)
        assert isinstance(check, NumericCheck)
        assert check.passed, check.to_dict()
        assert check.details == {"step": STEP, "order": 8}

    def test_chain_map_error_does_not_grow_under_refinement(self, curved, arc) -> None:
        x = curved.zigzag.normalize(ZigzagMonomial(2, 1, (U, A, U, U, U)))
        fields = [_field((0.4, -0.3), (0.1, 0.2))]
        check = refinement_check("chain_map", lambda ev: check_chain_map(ev, x, arc, fields), curved, tolerance=1e-4)
        assert check.name == "chain_map_refinement"
        assert check.passed, check.to_dict()
        assert check.details["fine"] <= max(check.details["coarse"], 1e-4)
        assert (check.details["step"], check.details["order"]) == (STEP, 8)

    def test_algebra_map_error_does_not_grow_under_refinement(self, scalar, arc) -> None:
        x = scalar.zigzag.normalize(ZigzagMonomial(2, 1, (U, DX0, U, U, U)))
        y = scalar.zigzag.eta({DX1: Fraction(1)})
        fields = [_field((0.5, -0.4), (0.1, 0.0))]
        check = refinement_check("algebra_map", lambda ev: check_algebra_map(ev, x, y, arc, fields), scalar, tolerance=1e-4)
        assert check.passed, check.to_dict()

    def test_growing_error_fails_the_refinement(self, curved) -> None:
        def worsens(ev: ChenEvaluator) -> NumericCheck:
            return NumericCheck("synthetic", ev.order * 1e-3, 1.0)

        check = refinement_check("synthetic", worsens, curved, tolerance=1e-4)
        assert not check.passed
        assert check.details == {"coarse": 8e-3, "fine": 16e-3, "step": STEP, "order": 8}
