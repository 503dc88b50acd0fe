"""Iterated Gauss–Legendre quadrature on ordered simplices.

Points of ``Δⁿ = {0 ≤ t₁ ≤ … ≤ t_n ≤ 1}`` are generated by nesting 1-D rules,
outermost variable ``t_n`` first. The rule for the k-th variable counted from
the innermost uses ``order + ceil((k-1)/2)`` nodes because each nested integral
raises the polynomial degree in the next variable by one; the result is exact
for polynomials of total degree ≤ ``2 * order - 1``.

Integrands that are only piecewise smooth across known breakpoints are handled
by splitting Δⁿ into products of smaller ordered simplices, one per way of
distributing the n times among the intervals between breakpoints.
"""

from __future__ import annotations

import functools
import itertools
import math
from typing import Callable, Sequence

import numpy as np

DEFAULT_ORDER = 8


@functools.lru_cache(maxsize=32)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the ``order``-point rule on [0, 1]."""
    if order < 1:
        raise ValueError(f"quadrature order must be positive, got {order}")
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return (nodes + 1.0) / 2.0, weights / 2.0


def simplex_rule(n: int, order: int = DEFAULT_ORDER, lower: float = 0.0, upper: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Nodes ``(M, n)`` with increasing coordinates in [lower, upper] and weights ``(M,)``."""
    points = np.zeros((1, 0))
    weights = np.ones(1)
    top = np.full(1, upper)
    for level in range(n, 0, -1):
        x, w = gauss_legendre(order + math.ceil((level - 1) / 2))
        span = top - lower
        values = lower + span[:, None] * x[None, :]
        weights = (weights[:, None] * span[:, None] * w[None, :]).ravel()
        points = np.concatenate([np.repeat(points, len(x), axis=0), values.reshape(-1, 1)], axis=1)
        top = values.ravel()
    return points[:, ::-1].copy(), weights


def _product_rule(rules: Sequence[tuple[np.ndarray, np.ndarray]]) -> tuple[np.ndarray, np.ndarray]:
    points, weights = np.zeros((1, 0)), np.ones(1)
    for p, w in rules:
        points = np.concatenate(
            [np.repeat(points, len(w), axis=0), np.tile(p, (len(weights), 1))], axis=1
        )
        weights = (weights[:, None] * w[None, :]).ravel()
    return points, weights


def split_simplex_rule(n: int, order: int = DEFAULT_ORDER, breakpoints: Sequence[float] = ()) -> tuple[np.ndarray, np.ndarray]:
    """Simplex rule with no cell straddling a breakpoint.

    Each cell puts ``c_j`` of the ordered times in the j-th interval between
    breakpoints; its rule is the product of the scaled simplex rules.
    """
    cuts = [0.0] + sorted(b for b in set(breakpoints) if 0.0 < b < 1.0) + [1.0]
    intervals = list(zip(cuts, cuts[1:]))
    if len(intervals) == 1:
        return simplex_rule(n, order)
    all_points, all_weights = [], []
    for counts in itertools.product(range(n + 1), repeat=len(intervals)):
        if sum(counts) != n:
            continue
        rules = [simplex_rule(c, order, lo, hi) for c, (lo, hi) in zip(counts, intervals)]
        points, weights = _product_rule(rules)
        all_points.append(points)
        all_weights.append(weights)
    return np.concatenate(all_points), np.concatenate(all_weights)


def simplex_quadrature(
    n: int,
    integrand: Callable[[np.ndarray], np.ndarray],
    order: int = DEFAULT_ORDER,
    breakpoints: Sequence[float] = (),
) -> np.ndarray:
    """``∫_{Δⁿ} integrand``; the integrand maps nodes ``(M, n)`` to values ``(M, ...)``."""
    points, weights = split_simplex_rule(n, order, breakpoints)
    values = np.asarray(integrand(points))
    return np.tensordot(weights, values, axes=(0, 0))
