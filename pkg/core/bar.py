"""The two-sided bar complex of a commutative flat DGA and the column collapse.

A bar monomial ``ω₀ ⊗ [ω₁ | … | ω_n] ⊗ ω_{n+1}`` is stored as the tuple of its
n + 2 entries; its degree is the sum of entry degrees minus n. Column collapse
sends a zigzag to the bar monomial whose j-th entry is the product of every
zigzag entry sitting in time column j.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from core.curved_dga import CurvedDGA
from core.errors import InvalidElementError, UnsupportedCarrierError
from core.graded import enumerate_shuffles, koszul_sign
from core.linear import Key, Vec, vec_accumulate
from core.zigzag import ZigzagMonomial, _coerce

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class BarMonomial:
    """``entries[0] ⊗ [entries[1] | … | entries[n]] ⊗ entries[n+1]``."""

    entries: tuple

    def __post_init__(self) -> None:
        if len(self.entries) < 2:
            raise InvalidElementError("a bar monomial has at least its two endpoint slots")

    @property
    def n(self) -> int:
        return len(self.entries) - 2


BarElement = dict


def require_commutative_flat(carrier: CurvedDGA) -> None:
    """Reject carriers the bar complex is not defined for.

    Raises:
        UnsupportedCarrierError: If the carrier is noncommutative or curved.
    """
    if not carrier.commutative:
        raise UnsupportedCarrierError(f"{carrier.name} is not graded commutative")
    if not carrier.is_flat:
        raise UnsupportedCarrierError(f"{carrier.name} has nonzero curvature")


def bar_degree(carrier: CurvedDGA, x: BarMonomial) -> int:
    return sum(carrier.degree(e) for e in x.entries) - x.n


def _product(carrier: CurvedDGA, keys: list[Key]) -> Vec:
    out: Vec = {carrier.unit_key: Fraction(1)}
    for key in keys:
        out = carrier.multiply(out, {key: Fraction(1)})
    return out


def _expand(factors: list[Vec]) -> list[tuple[tuple, Fraction]]:
    terms: list[tuple[tuple, Fraction]] = [((), Fraction(1))]
    for factor in factors:
        terms = [
            (keys + (key,), coefficient * c)
            for keys, coefficient in terms
            for key, c in factor.items()
        ]
    return terms


def bar_differential(carrier: CurvedDGA, x: BarMonomial | Mapping[BarMonomial, Fraction]) -> BarElement:
    """Slotwise ∇ with sign ``(-1)^(n+β)`` plus adjacent merges ``l, l+1`` with sign ``(-1)^(n+l)``."""
    require_commutative_flat(carrier)
    out: BarElement = {}
    for m, coefficient in _coerce_bar(x).items():
        n = m.n
        before = 0
        for s, entry in enumerate(m.entries):
            sign = -1 if (n + before) % 2 else 1
            for key, c in carrier.nabla_key(entry).items():
                entries = m.entries[:s] + (key,) + m.entries[s + 1:]
                vec_accumulate(out, {BarMonomial(entries): sign * c * coefficient})
            before += carrier.degree(entry)
        if n == 0:
            continue
        for l in range(n + 1):
            sign = -1 if (n + l) % 2 else 1
            merged = carrier.multiply_keys(m.entries[l], m.entries[l + 1])
            for key, c in merged.items():
                entries = m.entries[:l] + (key,) + m.entries[l + 2:]
                vec_accumulate(out, {BarMonomial(entries): sign * c * coefficient})
    return out


def bar_shuffle(
    carrier: CurvedDGA,
    x: BarMonomial | Mapping[BarMonomial, Fraction],
    y: BarMonomial | Mapping[BarMonomial, Fraction],
) -> BarElement:
    """Shuffle product; interiors interleave, endpoints multiply."""
    require_commutative_flat(carrier)
    out: BarElement = {}
    for mx, cx in _coerce_bar(x).items():
        for my, cy in _coerce_bar(y).items():
            vec_accumulate(out, _shuffle_pair(carrier, mx, my), cx * cy)
    return out


def _shuffle_pair(carrier: CurvedDGA, x: BarMonomial, y: BarMonomial) -> BarElement:
    n, m = x.n, y.n
    x_degree = bar_degree(carrier, x)
    degrees = [carrier.degree(e) for e in x.entries + y.entries]
    y_offset = n + 2
    out: BarElement = {}
    for sigma in enumerate_shuffles(n, m):
        interior = [0] * (n + m)
        for c in range(1, n + 1):
            interior[sigma(c) - 1] = c
        for c in range(1, m + 1):
            interior[sigma(n + c) - 1] = y_offset + c
        order = [0, y_offset] + interior + [n + 1, y_offset + m + 1]
        sign = koszul_sign(degrees, order) * (-1 if (sigma.inversions + x_degree * m) % 2 else 1)
        flat = x.entries + y.entries
        factors = (
            [carrier.multiply_keys(x.entries[0], y.entries[0])]
            + [{flat[i]: Fraction(1)} for i in interior]
            + [carrier.multiply_keys(x.entries[-1], y.entries[-1])]
        )
        for entries, coefficient in _expand(factors):
            vec_accumulate(out, {BarMonomial(entries): sign * coefficient})
    return out


def col_collapse(
    carrier: CurvedDGA, x: ZigzagMonomial | Mapping[ZigzagMonomial, Fraction]
) -> BarElement:
    """Column collapse: multiply each time column's entries in path order, with the Koszul sign of grouping."""
    require_commutative_flat(carrier)
    out: BarElement = {}
    for m, coefficient in _coerce(x).items():
        LOGGER.debug("collapsing (k=%d, n=%d) monomial", m.k, m.n)
        columns = m.columns
        order = sorted(range(m.slots), key=lambda s: (columns[s], s))
        sign = koszul_sign([carrier.degree(e) for e in m.entries], order)
        groups: list[list[Key]] = [[] for _ in range(m.n + 2)]
        for s in order:
            groups[columns[s]].append(m.entries[s])
        factors = [_product(carrier, group) for group in groups]
        for entries, c in _expand(factors):
            vec_accumulate(out, {BarMonomial(entries): sign * c * coefficient})
    return out


def _coerce_bar(x: BarMonomial | Mapping[BarMonomial, Fraction]) -> Mapping[BarMonomial, Fraction]:
    if isinstance(x, BarMonomial):
        return {x: Fraction(1)}
    return x


def sample_bar_monomial(carrier: CurvedDGA, rng: np.random.Generator, n: int, degree_cap: int = 2) -> BarMonomial:
    """Random bar monomial with n interior slots; endpoints are the unit half the time."""
    cap = min(degree_cap, carrier.max_sample_degree)
    entries = []
    for s in range(n + 2):
        if s in (0, n + 1) and rng.random() < 0.5:
            entries.append(carrier.unit_key)
        else:
            entries.append(carrier.sample_key(rng, int(rng.integers(0, cap + 1))))
    return BarMonomial(tuple(entries))
