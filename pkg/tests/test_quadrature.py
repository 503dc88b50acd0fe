"""Tests for Gauss–Legendre rules on ordered simplices."""

from __future__ import annotations

import math

import numpy as np
import pytest

from core.quadrature import gauss_legendre, simplex_quadrature, simplex_rule, split_simplex_rule


class TestGaussLegendre:
    """1-D rules on [0, 1]."""

    def test_weights_sum_to_one(self) -> None:
        _, w = gauss_legendre(5)
        assert w.sum() == pytest.approx(1.0)

    def test_exact_up_to_degree_2n_minus_1(self) -> None:
        x, w = gauss_legendre(3)
        assert np.dot(w, x**5) == pytest.approx(1 / 6)

    def test_order_must_be_positive(self) -> None:
        with pytest.raises(ValueError):
            gauss_legendre(0)


class TestSimplexRule:
    """Nested rules on Δⁿ = {0 ≤ t₁ ≤ … ≤ t_n ≤ 1}."""

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_volume(self, n: int) -> None:
        _, weights = simplex_rule(n, order=4)
        assert weights.sum() == pytest.approx(1 / math.factorial(n))

    def test_points_are_ordered(self) -> None:
        points, _ = simplex_rule(3, order=4)
        assert np.all(np.diff(points, axis=1) >= 0)
        assert points.min() >= 0.0 and points.max() <= 1.0

    def test_empty_simplex_is_a_point(self) -> None:
        points, weights = simplex_rule(0)
        assert points.shape == (1, 0)
        assert weights.tolist() == [1.0]

    def test_polynomial_integrand(self) -> None:
        value = simplex_quadrature(2, lambda p: p[:, 0] * p[:, 1], order=4)
        assert value == pytest.approx(1 / 8)

    def test_scaled_interval(self) -> None:
        _, weights = simplex_rule(2, order=3, lower=0.25, upper=0.75)
        assert weights.sum() == pytest.approx(0.5**2 / 2)


class TestSplitSimplexRule:
    """Cells that never straddle a breakpoint."""

    def test_volume_is_unchanged(self) -> None:
        _, weights = split_simplex_rule(3, order=3, breakpoints=(0.3, 0.6))
        assert weights.sum() == pytest.approx(1 / 6)

    def test_kink_is_integrated_exactly(self) -> None:
        value = simplex_quadrature(1, lambda p: np.abs(p[:, 0] - 0.5), order=2, breakpoints=(0.5,))
        assert value == pytest.approx(0.25)

    def test_breakpoints_outside_the_interval_are_ignored(self) -> None:
        a, wa = split_simplex_rule(2, order=3, breakpoints=(0.0, 1.0, 1.5))
        b, wb = simplex_rule(2, order=3)
        assert np.allclose(a, b) and np.allclose(wa, wb)

    def test_matrix_valued_integrand(self) -> None:
        value = simplex_quadrature(2, lambda p: np.ones((p.shape[0], 2, 2)), order=2, breakpoints=(0.5,))
        assert value.shape == (2, 2)
        assert np.allclose(value, 0.5)
