"""Tests for sparse rational vectors and exact linear algebra."""

from __future__ import annotations

from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from core.linear import (
    columns_to_rows,
    independent_subset,
    nullspace,
    rank,
    rref,
    solve,
    vec_add,
    vec_scale,
    vec_sub,
    vec_sum,
)

F = Fraction

small_fraction = st.fractions(min_value=-5, max_value=5, max_denominator=4)


class TestSparseVectors:
    """Zero coefficients never survive arithmetic."""

    def test_add_drops_cancelled_keys(self) -> None:
        assert vec_add({"a": F(1), "b": F(2)}, {"a": F(1)}, -1) == {"b": F(2)}

    def test_scale_by_zero_is_empty(self) -> None:
        assert vec_scale({"a": F(3)}, 0) == {}

    def test_sub_of_equal_vectors_is_empty(self) -> None:
        v = {"a": F(1, 2), "b": F(-1)}
        assert vec_sub(v, v) == {}

    def test_sum(self) -> None:
        assert vec_sum([{"a": F(1)}, {"a": F(2), "b": F(1)}, {"b": F(-1)}]) == {"a": F(3)}

    def test_columns_to_rows(self) -> None:
        rows = columns_to_rows([{"x": F(1)}, {"y": F(2), "x": F(3)}], {"x": 0, "y": 1})
        assert rows == [[F(1), F(3)], [F(0), F(2)]]


class TestExactMatrices:
    """Rank, reduced row echelon form, null spaces and solving over QQ."""

    def test_rank_of_dependent_rows(self) -> None:
        assert rank([[F(1), F(2)], [F(2), F(4)]], 2) == 1
        assert rank([], 3) == 0

    def test_rref_pivots(self) -> None:
        reduced, pivots = rref([[F(0), F(2), F(4)], [F(1), F(1), F(1)]], 3)
        assert pivots == (0, 1)
        assert reduced[0] == [F(1), F(0), F(-1)]
        assert reduced[1] == [F(0), F(1), F(2)]

    def test_nullspace(self) -> None:
        basis = nullspace([[F(1), F(1), F(0)]], 3)
        assert basis == [[F(-1), F(1), F(0)], [F(0), F(0), F(1)]]

    def test_solve_consistent(self) -> None:
        assert solve([[F(1), F(1)], [F(1), F(-1)]], 2, [F(3), F(1)]) == [F(2), F(1)]

    def test_solve_inconsistent(self) -> None:
        assert solve([[F(1), F(1)], [F(2), F(2)]], 2, [F(1), F(3)]) is None

    def test_solve_without_unknowns(self) -> None:
        assert solve([], 0, []) == []
        assert solve([[]], 0, [F(1)]) is None

    def test_independent_subset(self) -> None:
        vectors = [[F(1), F(0)], [F(2), F(0)], [F(0), F(1)]]
        assert independent_subset(vectors, 2) == [0, 2]
        assert independent_subset(vectors, 2, start=[[F(0), F(1)]]) == [0]

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.lists(small_fraction, min_size=3, max_size=3), min_size=1, max_size=4))
    def test_nullspace_vectors_are_annihilated(self, rows: list[list[Fraction]]) -> None:
        basis = nullspace(rows, 3)
        assert len(basis) == 3 - rank(rows, 3)
        for vector in basis:
            for row in rows:
                assert sum(a * b for a, b in zip(row, vector)) == 0
