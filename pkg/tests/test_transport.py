"""Tests for paths, tangent fields and parallel transport."""

from __future__ import annotations

import math

import numpy as np
import pytest

from core.curved_dga import example_connection, make_matrix_form_cdga
from core.errors import IntegrationError, InvalidConnectionError
from core.graded import FormElement
from core.transport import (
    BumpField,
    CirclePath,
    ConnectionData,
    LinePath,
    PolynomialField,
    PolynomialPath,
    SampledPath,
    StepField,
    StoppedPath,
    TransportTable,
    composition_gap,
    constant_line_transport_gap,
    constant_path,
    liouville_gap,
    parallel_transport,
    transport_derivative,
    transport_derivative_fd,
)

STEP = 2e-3


@pytest.fixture()
def conn() -> ConnectionData:
    return ConnectionData.from_cdga(make_matrix_form_cdga(2, 2, example_connection()))


@pytest.fixture()
def flat() -> ConnectionData:
    return ConnectionData.from_cdga(make_matrix_form_cdga(2, 2))


@pytest.fixture()
def arc() -> CirclePath:
    return CirclePath((0.1, -0.2), radius=0.7, start_angle=0.3, sweep=2.0)


class TestPaths:
    """Positions, velocities and derived paths."""

    @pytest.mark.parametrize(
        "path",
        [
            LinePath((0.0, 0.0), (1.0, -1.0)),
            CirclePath((0.0, 0.0), radius=0.5, sweep=math.pi),
            PolynomialPath(((0.0, 0.0), (1.0, 0.5), (-0.5, 0.25))),
        ],
    )
    def test_velocity_is_derivative_of_position(self, path) -> None:
        assert path.velocity_error() < 1e-6

    def test_sampled_path_interpolates(self) -> None:
        t = np.linspace(0, 1, 41)
        path = SampledPath(t, np.stack([np.sin(t), t**2], axis=1))
        assert np.allclose(path.position(np.asarray([0.5])), [[math.sin(0.5), 0.25]], atol=1e-5)
        assert path.velocity_error() < 1e-4

    def test_sampled_path_must_span_unit_interval(self) -> None:
        with pytest.raises(ValueError):
            SampledPath([0.0, 0.5], [[0.0, 0.0], [1.0, 1.0]])

    def test_stopped_path_rests(self, arc) -> None:
        stopped = StoppedPath(arc, 0.4)
        t = np.asarray([0.5, 0.9])
        assert np.allclose(stopped.position(t), arc.position(np.asarray([0.4, 0.4])))
        assert np.allclose(stopped.velocity(t), 0.0)
        assert stopped.breakpoints == (0.4,)

    def test_constant_path(self) -> None:
        path = constant_path([1, 2])
        assert np.allclose(path.velocity(np.asarray([0.3])), 0.0)
        assert np.allclose(path.basepoint, [1.0, 2.0])


class TestFields:
    """Tangent fields along paths."""

    def test_polynomial_field_derivative(self) -> None:
        field = PolynomialField(((1.0, 0.0), (0.0, 2.0)))
        assert np.allclose(field.at(0.5), [1.0, 1.0])
        assert np.allclose(field.derivative(np.asarray([0.5])), [[0.0, 2.0]])

    def test_bump_field_is_compactly_supported(self) -> None:
        field = BumpField((1.0, 0.0), center=0.5, width=0.2)
        assert np.allclose(field.value(np.asarray([0.0, 0.29, 0.71, 1.0])), 0.0)
        assert field.at(0.5)[0] > 0

    def test_step_field(self) -> None:
        field = StepField((0.0, 1.0), 0.5)
        assert np.allclose(field.value(np.asarray([0.2, 0.7])), [[0.0, 0.0], [0.0, 1.0]])
        assert field.breakpoints == (0.5,)


class TestConnectionData:
    """Numeric connection and curvature values."""

    def test_curvature_of_example(self, conn) -> None:
        points = np.zeros((1, 2))
        u, v = np.asarray([[1.0, 0.0]]), np.asarray([[0.0, 1.0]])
        assert np.allclose(conn.curvature(points, u, v)[0], [[2.0, 0.0], [0.0, -2.0]])
        assert np.allclose(conn.curvature(points, v, u)[0], [[-2.0, 0.0], [0.0, 2.0]])

    def test_along(self, conn) -> None:
        value = conn.along(np.zeros((1, 2)), np.asarray([[1.0, 1.0]]))[0]
        assert np.allclose(value, [[0.0, 2.0], [0.0, 0.0]])

    def test_rejects_two_form(self) -> None:
        two_form = FormElement.constant([[1, 0], [0, 1]], (0, 1), 2)
        with pytest.raises(InvalidConnectionError):
            ConnectionData(two_form, two_form)


class TestParallelTransport:
    """RK4 transport ``P' = -A(γ̇) P``."""

    def test_flat_transport_is_identity(self, flat, arc) -> None:
        assert np.allclose(parallel_transport(flat, arc), np.eye(2))

    def test_constant_connection_on_a_segment(self, conn) -> None:
        assert constant_line_transport_gap(conn, (0.0, 0.0), (0.6, -0.3), STEP) < 1e-9

    def test_liouville(self, conn, arc) -> None:
        assert liouville_gap(conn, arc, step=STEP) < 1e-9

    def test_composition(self, conn, arc) -> None:
        assert composition_gap(conn, arc, 0.3, 0.8, STEP) < 1e-9

    def test_reversal_inverts(self, conn, arc) -> None:
        forward = parallel_transport(conn, arc, 0.2, 0.9, STEP)
        backward = parallel_transport(conn, arc, 0.9, 0.2, STEP)
        assert np.allclose(forward @ backward, np.eye(2), atol=1e-9)

    def test_endpoints_must_lie_in_unit_interval(self, conn, arc) -> None:
        with pytest.raises(ValueError):
            parallel_transport(conn, arc, 0.0, 1.5)

    def test_table_matches_direct_transport(self, conn, arc) -> None:
        table = TransportTable(conn, arc, STEP)
        t = np.asarray([0.0, 0.1234, 0.5, 0.98765])
        direct = np.stack([parallel_transport(conn, arc, 0.0, float(s), STEP) for s in t])
        assert np.allclose(table.from_zero(t), direct, atol=1e-9)
        between = table.between(np.asarray([0.2]), np.asarray([0.7]))[0]
        assert np.allclose(between, parallel_transport(conn, arc, 0.2, 0.7, STEP), atol=1e-9)


class TestTransportDerivative:
    """Variation of transport along a path family."""

    def test_matches_finite_difference(self, conn, arc) -> None:
        field = PolynomialField(((0.2, -0.1), (0.3, 0.4)))
        exact = transport_derivative(conn, arc, field, 0.0, 1.0, step=STEP)
        fd = transport_derivative_fd(conn, arc, field, 0.0, 1.0, h=1e-4, step=STEP)
        assert np.max(np.abs(exact - fd)) < 1e-4

    def test_vanishes_for_flat_connection(self, flat, arc) -> None:
        field = PolynomialField(((1.0, 0.0),))
        assert np.allclose(transport_derivative(flat, arc, field), 0.0)

    def test_vanishes_for_velocity_direction_on_a_segment(self, conn) -> None:
        line = LinePath((0.0, 0.0), (0.5, 0.5))
        field = PolynomialField(((0.5, 0.5),))
        assert np.allclose(transport_derivative(conn, line, field, step=STEP), 0.0)

    def test_finite_difference_step_must_be_positive(self, conn, arc) -> None:
        with pytest.raises(IntegrationError):
            transport_derivative_fd(conn, arc, PolynomialField(((1.0, 0.0),)), h=0.0)
