"""Sparse rational vectors over basis keys and exact linear algebra over QQ.

Elements of every carrier algebra are handled as ``{basis key: coefficient}``
maps. The rank and solve routines wrap ``sympy``'s ``DomainMatrix`` over
``QQ`` so that rank decisions never depend on floating-point thresholds.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

LOGGER = logging.getLogger(__name__)

Key = Hashable
Vec = dict


# ---------------------------------------------------------------------------
# Sparse vectors
# ---------------------------------------------------------------------------


def vec_clean(vec: Mapping[Key, Fraction]) -> Vec:
    return {k: c for k, c in vec.items() if c != 0}


def vec_add(a: Mapping[Key, Fraction], b: Mapping[Key, Fraction], factor: Fraction | int = 1) -> Vec:
    """``a + factor * b``."""
    out = dict(a)
    for key, coefficient in b.items():
        value = out.get(key, 0) + factor * coefficient
        if value == 0:
            out.pop(key, None)
        else:
            out[key] = value
    return out


def vec_accumulate(target: dict, source: Mapping[Key, Fraction], factor: Fraction | int = 1) -> None:
    """In-place ``target += factor * source``."""
    for key, coefficient in source.items():
        value = target.get(key, 0) + factor * coefficient
        if value == 0:
            target.pop(key, None)
        else:
            target[key] = value


def vec_scale(a: Mapping[Key, Fraction], factor: Fraction | int) -> Vec:
    if factor == 0:
        return {}
    return {k: c * factor for k, c in a.items()}


def vec_sub(a: Mapping[Key, Fraction], b: Mapping[Key, Fraction]) -> Vec:
    return vec_add(a, b, -1)


def vec_sum(vectors: Iterable[Mapping[Key, Fraction]]) -> Vec:
    out: dict = {}
    for vec in vectors:
        vec_accumulate(out, vec)
    return out


# ---------------------------------------------------------------------------
# Exact matrices
# ---------------------------------------------------------------------------


def _to_qq(value: Fraction | int) -> object:
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def _from_sympy(value: object) -> Fraction:
    return Fraction(int(value.p), int(value.q))  # type: ignore[attr-defined]


def columns_to_rows(
    columns: Sequence[Mapping[Key, Fraction]], row_index: Mapping[Key, int]
) -> list[list[Fraction]]:
    """Dense row-major matrix whose j-th column is ``columns[j]`` in ``row_index`` coordinates.

    Raises:
        KeyError: If a column mentions a key absent from ``row_index``.
    """
    rows = [[Fraction(0)] * len(columns) for _ in range(len(row_index))]
    for j, column in enumerate(columns):
        for key, coefficient in column.items():
            rows[row_index[key]][j] = Fraction(coefficient)
    return rows


def _domain_matrix(rows: Sequence[Sequence[Fraction]], ncols: int) -> DomainMatrix:
    return DomainMatrix(
        [[_to_qq(c) for c in row] for row in rows], (len(rows), ncols), QQ
    )


def rank(rows: Sequence[Sequence[Fraction]], ncols: int) -> int:
    if not rows or ncols == 0:
        return 0
    value = int(_domain_matrix(rows, ncols).rank())
    LOGGER.debug("rank %d of %dx%d matrix", value, len(rows), ncols)
    return value


def rref(rows: Sequence[Sequence[Fraction]], ncols: int) -> tuple[list[list[Fraction]], tuple[int, ...]]:
    """Reduced row echelon form and pivot columns."""
    if not rows or ncols == 0:
        return [list(map(Fraction, row)) for row in rows], ()
    reduced, pivots = _domain_matrix(rows, ncols).rref()
    dense = reduced.to_Matrix()
    out = [[_from_sympy(dense[i, j]) for j in range(ncols)] for i in range(len(rows))]
    return out, tuple(int(p) for p in pivots)


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[list[Fraction]]:
    """Basis of ``{v : M v = 0}``, one vector per free column."""
    reduced, pivots = rref(rows, ncols)
    basis = []
    for free in (c for c in range(ncols) if c not in pivots):
        vector = [Fraction(0)] * ncols
        vector[free] = Fraction(1)
        for i, pivot in enumerate(pivots):
            vector[pivot] = -reduced[i][free]
        basis.append(vector)
    return basis


def solve(rows: Sequence[Sequence[Fraction]], ncols: int, rhs: Sequence[Fraction]) -> list[Fraction] | None:
    """One solution of ``M v = rhs`` (free variables zero), or ``None`` if inconsistent."""
    if ncols == 0 or not rows:
        return [Fraction(0)] * ncols if all(b == 0 for b in rhs) else None
    augmented = [list(row) + [Fraction(b)] for row, b in zip(rows, rhs)]
    reduced, pivots = rref(augmented, ncols + 1)
    if ncols in pivots:
        return None
    solution = [Fraction(0)] * ncols
    for i, pivot in enumerate(pivots):
        solution[pivot] = reduced[i][ncols]
    return solution


def independent_subset(vectors: Sequence[Sequence[Fraction]], dimension: int, start: Sequence[Sequence[Fraction]] = ()) -> list[int]:
    """Indices of ``vectors`` that extend the span of ``start`` independently, greedily in order."""
    chosen: list[int] = []
    current = [list(v) for v in start]
    current_rank = rank(_transpose(current, dimension), len(current)) if current else 0
    for index, vector in enumerate(vectors):
        trial = current + [list(vector)]
        trial_rank = rank(_transpose(trial, dimension), len(trial))
        if trial_rank > current_rank:
            chosen.append(index)
            current, current_rank = trial, trial_rank
    return chosen


def _transpose(vectors: Sequence[Sequence[Fraction]], dimension: int) -> list[list[Fraction]]:
    return [[vector[i] for vector in vectors] for i in range(dimension)]
