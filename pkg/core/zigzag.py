"""The zigzag algebra ZZ(𝒜) of a curved DGA.

A zigzag monomial over a carrier 𝒜 is a grid of basis keys arranged along a
path that starts at the left endpoint, then runs through k rows which alternately
go left to right (zigs, odd rows) and right to left (zags, even rows) across n
interior time columns. Slots are stored flat in path order:

    slot(0, 0) = 0,    slot(i, p) = 1 + (i - 1)(n + 1) + (p - 1)

and the time column of ``slot(i, p)`` is ``p`` on zigs and ``n + 1 - p`` on
zags. The degree of a monomial is the sum of its entry degrees minus n.

Monomials are identified modulo two relations: all-unit zig/zag pairs may be
inserted or deleted, and an entry may slide through unit slots to the adjacent
visit of its column, multiplying with what it finds there. :meth:`ZigzagAlgebra.normalize`
computes the canonical representative; every public operation returns
normalized elements so that equality of :class:`ZigzagElement` is equality of
the quotient.

The differential is ``D_z = ∇_z + b_z + c_z``, the product is the shuffle
product ⊙, and the curvature is ``R_z = R ⊗ 1 ⊗ 1``. :class:`ZigzagAlgebra`
implements the :class:`~core.curved_dga.CurvedDGA` interface with these, so the
generic axiom checker runs on ZZ(𝒜) itself. The sign conventions are the ones
frozen in SIGNS.md.
"""

from __future__ import annotations

import functools
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from core.curved_dga import CurvedDGA, DGAMorphismWitness, check_morphism
from core.errors import InvalidElementError, UnsupportedCarrierError
from core.graded import enumerate_shuffles
from core.linear import Key, Vec, vec_accumulate

LOGGER = logging.getLogger(__name__)

KNOWN_FAULTS = frozenset({"c_z_sign", "shuffle_sign"})


@functools.lru_cache(maxsize=None)
def zigzag_layout(k: int, n: int) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
    """Columns, rows and previous same-column visits of every slot.

    Returns:
        ``(columns, rows, previous)`` where ``previous[s]`` is the last slot
        before ``s`` in the same column, or -1.
    """
    columns = [0]
    rows = [0]
    for i in range(1, k + 1):
        for p in range(1, n + 2):
            columns.append(p if i % 2 else n + 1 - p)
            rows.append(i)
    previous = []
    last_seen: dict[int, int] = {}
    for s, column in enumerate(columns):
        previous.append(last_seen.get(column, -1))
        last_seen[column] = s
    return tuple(columns), tuple(rows), tuple(previous)


def slot_index(i: int, p: int, n: int) -> int:
    """Flat index of ``x_(i,p)``; ``(0, 0)`` is the left endpoint."""
    if i == 0:
        return 0
    return 1 + (i - 1) * (n + 1) + (p - 1)


@dataclass(frozen=True)
class ZigzagMonomial:
    """A (k, n) grid of carrier basis keys stored in path order.

    Attributes:
        k: Number of rows (zigs plus zags), even and at least 2.
        n: Number of interior time columns.
        entries: ``1 + k(n+1)`` basis keys; see the module docstring for the layout.
    """

    k: int
    n: int
    entries: tuple

    def __post_init__(self) -> None:
        if self.k < 2 or self.k % 2:
            raise InvalidElementError(f"k must be even and at least 2, got {self.k}")
        if self.n < 0:
            raise InvalidElementError(f"n must be nonnegative, got {self.n}")
        if len(self.entries) != 1 + self.k * (self.n + 1):
            raise InvalidElementError(
                f"a ({self.k},{self.n}) zigzag has {1 + self.k * (self.n + 1)} slots, "
                f"got {len(self.entries)}"
            )

    @property
    def slots(self) -> int:
        return len(self.entries)

    def entry(self, i: int, p: int) -> Key:
        return self.entries[slot_index(i, p, self.n)]

    @property
    def columns(self) -> tuple[int, ...]:
        return zigzag_layout(self.k, self.n)[0]


class ZigzagElement(dict):
    """A rational combination of normalized zigzag monomials, ``{monomial: coefficient}``.

    Equality is termwise equality of the normalized terms.
    """

    def monomials(self) -> list[ZigzagMonomial]:
        return list(self.keys())

    def scaled(self, factor: Fraction | int) -> ZigzagElement:
        return ZigzagElement({m: c * factor for m, c in self.items() if c * factor != 0})

    def __add__(self, other: Mapping[ZigzagMonomial, Fraction]) -> ZigzagElement:  # type: ignore[override]
        out = ZigzagElement(self)
        vec_accumulate(out, other)
        return out

    def __sub__(self, other: Mapping[ZigzagMonomial, Fraction]) -> ZigzagElement:
        out = ZigzagElement(self)
        vec_accumulate(out, other, -1)
        return out


def _coerce(x: ZigzagMonomial | Mapping[ZigzagMonomial, Fraction]) -> Mapping[ZigzagMonomial, Fraction]:
    if isinstance(x, ZigzagMonomial):
        return {x: Fraction(1)}
    return x


class ZigzagAlgebra(CurvedDGA):
    """ZZ(𝒜) for a carrier curved DGA 𝒜.

    Args:
        carrier: The curved DGA supplying the entries.
        faults: Optional sign faults, for negative-control runs only.
        sample_rows: Row counts drawn by the sampler.
        sample_columns: Interior column counts drawn by the sampler.
        entry_degree_cap: Highest entry degree drawn by the sampler.
        unit_probability: Chance that a sampled slot holds the unit.
    """

    def __init__(
        self,
        carrier: CurvedDGA,
        faults: Iterable[str] = (),
        sample_rows: Sequence[int] = (2, 4),
        sample_columns: Sequence[int] = (0, 1, 2),
        entry_degree_cap: int = 2,
        unit_probability: float = 0.5,
    ) -> None:
        super().__init__()
        unknown = set(faults) - KNOWN_FAULTS
        if unknown:
            raise ValueError(f"unknown faults: {sorted(unknown)}")
        self.carrier = carrier
        self.faults = frozenset(faults)
        self.name = f"ZZ({carrier.name})"
        self.sample_rows = tuple(sample_rows)
        self.sample_columns = tuple(sample_columns)
        self.entry_degree_cap = entry_degree_cap
        self.unit_probability = unit_probability
        self._normal_cache: dict[ZigzagMonomial, dict] = {}

    # -- CurvedDGA structure ------------------------------------------------

    @property
    def unit_key(self) -> ZigzagMonomial:
        u = self.carrier.unit_key
        return ZigzagMonomial(2, 0, (u, u, u))

    @property
    def curvature(self) -> Vec:
        return dict(self.R_z())

    def degree(self, key: Key) -> int:
        m: ZigzagMonomial = key  # type: ignore[assignment]
        return sum(self.carrier.degree(e) for e in m.entries) - m.n

    def _multiply_keys(self, left: Key, right: Key) -> Vec:
        return self._shuffle_monomials(left, right)  # type: ignore[arg-type]

    def _nabla_key(self, key: Key) -> Vec:
        m: ZigzagMonomial = key  # type: ignore[assignment]
        out: dict = {}
        vec_accumulate(out, self._nabla_z_raw(m))
        vec_accumulate(out, self._b_z_raw(m))
        vec_accumulate(out, self._c_z_raw(m))
        return self._normalize_vec(out)

    def sample_key(self, rng: np.random.Generator, degree: int | None = None) -> Key:
        for _ in range(200):
            element = self.sample_element(rng)
            key = next(iter(element))
            if degree is None or self.degree(key) == degree:
                return key
        raise InvalidElementError(f"could not sample a zigzag of degree {degree}")

    def sample_element(
        self, rng: np.random.Generator, degree: int | None = None, terms: int = 1
    ) -> Vec:
        """Normalization of a random raw monomial with a random scalar."""
        for _ in range(200):
            k = self.sample_rows[int(rng.integers(0, len(self.sample_rows)))]
            n = self.sample_columns[int(rng.integers(0, len(self.sample_columns)))]
            raw = self.sample_monomial(rng, k, n)
            if degree is not None and self.degree(raw) != degree:
                continue
            coefficient = Fraction(int(rng.integers(1, 4)) * (1 if rng.random() < 0.5 else -1))
            element = self.normalize(raw).scaled(coefficient)
            if element:
                return element
        raise InvalidElementError("sampler produced only zero elements")

    def sample_monomial(self, rng: np.random.Generator, k: int, n: int) -> ZigzagMonomial:
        """A raw (unnormalized) monomial with random carrier entries."""
        cap = min(self.entry_degree_cap, self.carrier.max_sample_degree)
        entries = []
        for _ in range(1 + k * (n + 1)):
            if rng.random() < self.unit_probability:
                entries.append(self.carrier.unit_key)
            else:
                entries.append(self.carrier.sample_key(rng, int(rng.integers(0, cap + 1))))
        return ZigzagMonomial(k, n, tuple(entries))

    def describe_key(self, key: Key) -> str:
        m: ZigzagMonomial = key  # type: ignore[assignment]
        columns = m.columns
        cells = [
            f"({0 if s == 0 else zigzag_layout(m.k, m.n)[1][s]},c{columns[s]}):{self.carrier.describe_key(e)}"
            for s, e in enumerate(m.entries)
            if not self.carrier.is_unit_key(e)
        ]
        return f"Z[k={m.k},n={m.n}]{{{', '.join(cells) or 'units'}}}"

    def encode_key(self, key: Key) -> Any:
        return monomial_to_grid(self.carrier, key)  # type: ignore[arg-type]

    def decode_key(self, data: Any) -> Key:
        monomial, _ = monomial_from_grid(self.carrier, data)
        return monomial

    # -- normal form --------------------------------------------------------

    def _is_unit(self, key: Key) -> bool:
        return self.carrier.is_unit_key(key)

    def _push_pass(self, entries: list, coefficient: Fraction, k: int, n: int) -> tuple[list[tuple[list, Fraction]], bool]:
        """One forward sliding pass; returns the branches and whether anything moved."""
        _, _, previous = zigzag_layout(k, n)
        branches = [(entries, coefficient)]
        changed = False
        for s in range(len(entries)):
            next_branches = []
            for ents, coef in branches:
                entry = ents[s]
                if self._is_unit(entry):
                    next_branches.append((ents, coef))
                    continue
                position = s
                merge_target = -1
                while True:
                    t = previous[position]
                    if t < 0 or any(not self._is_unit(ents[u]) for u in range(t + 1, position)):
                        break
                    if self._is_unit(ents[t]):
                        position = t
                        continue
                    merge_target = t
                    break
                if merge_target >= 0:
                    changed = True
                    product = self.carrier.multiply_keys(ents[merge_target], entry)
                    for key, c in product.items():
                        branch = list(ents)
                        branch[s] = self.carrier.unit_key
                        branch[merge_target] = key
                        next_branches.append((branch, coef * c))
                elif position != s:
                    changed = True
                    branch = list(ents)
                    branch[s] = self.carrier.unit_key
                    branch[position] = entry
                    next_branches.append((branch, coef))
                else:
                    next_branches.append((ents, coef))
            branches = next_branches
        return branches, changed

    def _normalize_monomial(self, m: ZigzagMonomial) -> dict:
        cached = self._normal_cache.get(m)
        if cached is not None:
            return cached
        pending = [(list(m.entries), Fraction(1))]
        settled: list[tuple[list, Fraction]] = []
        while pending:
            entries, coefficient = pending.pop()
            branches, changed = self._push_pass(entries, coefficient, m.k, m.n)
            if changed:
                pending.extend(branches)
            else:
                settled.extend(branches)
        out: dict = {}
        for entries, coefficient in settled:
            k = m.k
            while k > 2 and all(
                self._is_unit(e) for e in entries[len(entries) - 2 * (m.n + 1):]
            ):
                entries = entries[: len(entries) - 2 * (m.n + 1)]
                k -= 2
            vec_accumulate(out, {ZigzagMonomial(k, m.n, tuple(entries)): coefficient})
        LOGGER.debug("normal form of %d-slot monomial has %d terms", m.slots, len(out))
        self._normal_cache[m] = out
        return out

    def _normalize_vec(self, vec: Mapping[ZigzagMonomial, Fraction]) -> dict:
        out: dict = {}
        for m, coefficient in vec.items():
            vec_accumulate(out, self._normalize_monomial(m), coefficient)
        return out

    def normalize(self, x: ZigzagMonomial | Mapping[ZigzagMonomial, Fraction]) -> ZigzagElement:
        """Canonical representative modulo unit insertion and sliding through units."""
        return ZigzagElement(self._normalize_vec(_coerce(x)))

    def element(self, terms: Mapping[ZigzagMonomial, Fraction]) -> ZigzagElement:
        return self.normalize(terms)

    def monomial(self, k: int, n: int, grid: Mapping[tuple[int, int], Key]) -> ZigzagMonomial:
        """Raw monomial with the given ``(i, p) -> key`` entries and units elsewhere."""
        entries = [self.carrier.unit_key] * (1 + k * (n + 1))
        for (i, p), key in grid.items():
            entries[slot_index(i, p, n)] = key
        return ZigzagMonomial(k, n, tuple(entries))

    # -- differential -------------------------------------------------------

    def _expand_entries(self, factors: Sequence[Mapping[Key, Fraction]]) -> Iterable[tuple[tuple, Fraction]]:
        """All basis-key tuples of a product of per-slot vectors, with coefficients."""
        for combination in itertools.product(*(list(f.items()) for f in factors)):
            coefficient = Fraction(1)
            for _, c in combination:
                coefficient *= c
            yield tuple(key for key, _ in combination), coefficient

    def _nabla_z_raw(self, m: ZigzagMonomial) -> dict:
        out: dict = {}
        before = 0
        for s, entry in enumerate(m.entries):
            if not self._is_unit(entry):
                sign = -1 if (m.n + before) % 2 else 1
                for key, c in self.carrier.nabla_key(entry).items():
                    entries = m.entries[:s] + (key,) + m.entries[s + 1:]
                    vec_accumulate(out, {ZigzagMonomial(m.k, m.n, entries): sign * c})
            before += self.carrier.degree(entry)
        return out

    def _b_z_raw(self, m: ZigzagMonomial) -> dict:
        out: dict = {}
        if m.n == 0:
            return out
        columns = m.columns
        for l in range(m.n + 1):
            labels = [c if c <= l else c - 1 for c in columns]
            runs: list[list[Key]] = []
            for s, entry in enumerate(m.entries):
                if s > 0 and labels[s] == labels[s - 1]:
                    runs[-1].append(entry)
                else:
                    runs.append([entry])
            factors = []
            for run in runs:
                product: Vec = {run[0]: Fraction(1)}
                for entry in run[1:]:
                    product = self.carrier.multiply(product, {entry: Fraction(1)})
                factors.append(product)
            sign = -1 if (m.n + l) % 2 else 1
            for entries, coefficient in self._expand_entries(factors):
                vec_accumulate(out, {ZigzagMonomial(m.k, m.n - 1, entries): sign * coefficient})
        return out

    def _c_z_raw(self, m: ZigzagMonomial) -> dict:
        out: dict = {}
        curvature = self.carrier.curvature
        if not curvature:
            return out
        columns = m.columns
        unit = self.carrier.unit_key
        flip = -1 if "c_z_sign" in self.faults else 1
        for l in range(1, m.n + 2):
            crossings = [
                s for s in range(len(columns) - 1) if {columns[s], columns[s + 1]} == {l - 1, l}
            ]
            if len(crossings) != m.k:
                raise InvalidElementError(f"expected {m.k} crossings at column {l}, found {len(crossings)}")
            for j in range(1, m.k + 1):
                sign = flip * (-1 if (m.n + l + j + 1) % 2 else 1)
                for r_key, r_coefficient in curvature.items():
                    entries: list = []
                    row = 0
                    for s, entry in enumerate(m.entries):
                        entries.append(entry)
                        if row < m.k and s == crossings[row]:
                            row += 1
                            entries.append(r_key if row == j else unit)
                    vec_accumulate(
                        out, {ZigzagMonomial(m.k, m.n + 1, tuple(entries)): sign * r_coefficient}
                    )
        return out

    def _apply_raw(self, x: Mapping[ZigzagMonomial, Fraction], operator: Any) -> ZigzagElement:
        out: dict = {}
        for m, coefficient in _coerce(x).items():
            vec_accumulate(out, operator(m), coefficient)
        return ZigzagElement(self._normalize_vec(out))

    def nabla_z(self, x: ZigzagMonomial | Mapping[ZigzagMonomial, Fraction]) -> ZigzagElement:
        """Slotwise ∇ with sign ``(-1)^(n + β)``, β the degree before the slot."""
        return self._apply_raw(x, self._nabla_z_raw)

    def b_z(self, x: ZigzagMonomial | Mapping[ZigzagMonomial, Fraction]) -> ZigzagElement:
        """Sum over merges of adjacent columns ``l, l+1`` with sign ``(-1)^(n+l)``; zero for n = 0."""
        return self._apply_raw(x, self._b_z_raw)

    def c_z(self, x: ZigzagMonomial | Mapping[ZigzagMonomial, Fraction]) -> ZigzagElement:
        """Sum over rows j and gaps l of inserting R on row j in a new column l."""
        return self._apply_raw(x, self._c_z_raw)

    def D_z(self, x: ZigzagMonomial | Mapping[ZigzagMonomial, Fraction]) -> ZigzagElement:
        """``D_z = ∇_z + b_z + c_z`` on normalized input, normalized output."""
        out: dict = {}
        for m, coefficient in _coerce(x).items():
            vec_accumulate(out, self.nabla_key(m), coefficient)
        return ZigzagElement(out)

    def R_z(self) -> ZigzagElement:
        """``R ⊗ 1 ⊗ 1``."""
        u = self.carrier.unit_key
        return self.normalize(
            {ZigzagMonomial(2, 0, (key, u, u)): c for key, c in self.carrier.curvature.items()}
        )

    # -- product ------------------------------------------------------------

    def _shuffle_monomials(self, x: ZigzagMonomial, y: ZigzagMonomial) -> dict:
        n, m = x.n, y.n
        total = n + m
        x_degree = self.degree(x)
        unit = self.carrier.unit_key
        rows_x, rows_y = zigzag_layout(x.k, n)[1], zigzag_layout(y.k, m)[1]
        out: dict = {}
        flip = -1 if "shuffle_sign" in self.faults else 1
        for sigma in enumerate_shuffles(n, m):
            sign = flip * (-1 if (sigma.inversions + x_degree * m) % 2 else 1)

            def map_x(c: int) -> int:
                return 0 if c == 0 else total + 1 if c == n + 1 else sigma(c)

            def map_y(c: int) -> int:
                return 0 if c == 0 else total + 1 if c == m + 1 else sigma(n + c)

            grid: list = [unit] * (1 + (x.k + y.k) * (total + 1))
            width = total + 1
            for s in range(1, x.slots):
                row = rows_x[s]
                target_column = map_x(x.columns[s])
                base = 1 + (row - 1) * width
                offset = target_column - 1 if row % 2 else total - target_column
                grid[base + offset] = x.entries[s]
            for s in range(1, y.slots):
                row = rows_y[s] + x.k
                target_column = map_y(y.columns[s])
                base = 1 + (row - 1) * width
                offset = target_column - 1 if row % 2 else total - target_column
                grid[base + offset] = y.entries[s]
            grid[0] = x.entries[0]
            junction = x.k * width
            factors: list[Vec] = [{e: Fraction(1)} for e in grid]
            factors[junction] = self.carrier.multiply_keys(x.entries[-1], y.entries[0])
            for entries, coefficient in self._expand_entries(factors):
                vec_accumulate(out, {ZigzagMonomial(x.k + y.k, total, entries): sign * coefficient})
        return self._normalize_vec(out)

    def shuffle(
        self,
        x: ZigzagMonomial | Mapping[ZigzagMonomial, Fraction],
        y: ZigzagMonomial | Mapping[ZigzagMonomial, Fraction],
    ) -> ZigzagElement:
        """Shuffle product ``x ⊙ y``."""
        out: dict = {}
        for m1, c1 in _coerce(x).items():
            for m2, c2 in _coerce(y).items():
                vec_accumulate(out, self.multiply_keys(m1, m2), c1 * c2)
        return ZigzagElement(out)

    # -- homotopy equivalence with the carrier ------------------------------

    def eta(self, a: Mapping[Key, Fraction] | Any) -> ZigzagElement:
        """``η(ω) = ω ⊗ 1 ⊗ 1``."""
        vec = self.carrier.expand(a)
        u = self.carrier.unit_key
        return self.normalize({ZigzagMonomial(2, 0, (key, u, u)): c for key, c in vec.items()})

    def alpha(self, x: ZigzagMonomial | Mapping[ZigzagMonomial, Fraction]) -> Vec:
        """Product of all entries in path order for n = 0 monomials, zero otherwise."""
        out: dict = {}
        for m, coefficient in _coerce(x).items():
            if m.n:
                continue
            product: Vec = {m.entries[0]: Fraction(1)}
            for entry in m.entries[1:]:
                product = self.carrier.multiply(product, {entry: Fraction(1)})
            vec_accumulate(out, product, coefficient)
        return out

    def _s_raw(self, m: ZigzagMonomial) -> dict:
        unit = self.carrier.unit_key
        entries: list = [m.entries[0]]
        width = m.n + 1
        for i in range(1, m.k + 1):
            row = list(m.entries[1 + (i - 1) * width: 1 + i * width])
            if i % 2:
                entries.extend(row + [unit])
            else:
                entries.extend([unit] + row)
        return {ZigzagMonomial(m.k, m.n + 1, tuple(entries)): Fraction(1)}

    def s_homotopy(self, x: ZigzagMonomial | Mapping[ZigzagMonomial, Fraction]) -> ZigzagElement:
        """Contracting homotopy: new unit right endpoint and unit first zag slot on every row pair."""
        return self._apply_raw(x, self._s_raw)

    # -- raw moves used by the confluence checks ----------------------------

    def insert_units(self, m: ZigzagMonomial, j: int) -> ZigzagMonomial:
        """Insert two all-unit rows after row ``j`` (0 <= j <= k)."""
        if not 0 <= j <= m.k:
            raise InvalidElementError(f"row {j} is outside 0..{m.k}")
        width = m.n + 1
        cut = 1 + j * width
        units = (self.carrier.unit_key,) * (2 * width)
        return ZigzagMonomial(m.k + 2, m.n, m.entries[:cut] + units + m.entries[cut:])

    def slide_entry(self, m: ZigzagMonomial, slot: int) -> ZigzagMonomial | None:
        """Move a non-unit entry forward to the next visit of its column through units.

        Returns ``None`` when the corridor or the destination is occupied.
        """
        columns = m.columns
        entry = m.entries[slot]
        if self._is_unit(entry):
            return None
        for t in range(slot + 1, m.slots):
            if columns[t] == columns[slot]:
                if not self._is_unit(m.entries[t]):
                    return None
                entries = list(m.entries)
                entries[t], entries[slot] = entry, self.carrier.unit_key
                return ZigzagMonomial(m.k, m.n, tuple(entries))
            if not self._is_unit(m.entries[t]):
                return None
        return None

    def split_entry(self, m: ZigzagMonomial, slot: int, rng: np.random.Generator) -> ZigzagMonomial | None:
        """Undo a merge: factor the entry as ``a · b`` and push b to the next visit of its column.

        Returns ``None`` when no unit corridor leads to a free slot in that column.
        """
        columns = m.columns
        for t in range(slot + 1, m.slots):
            if columns[t] == columns[slot]:
                if not self._is_unit(m.entries[t]):
                    return None
                left, right = self.carrier.factor_key(m.entries[slot], rng)
                entries = list(m.entries)
                entries[slot], entries[t] = left, right
                return ZigzagMonomial(m.k, m.n, tuple(entries))
            if not self._is_unit(m.entries[t]):
                return None
        return None


# ---------------------------------------------------------------------------
# Functoriality and serialization
# ---------------------------------------------------------------------------


def zz_map(
    f: DGAMorphismWitness,
    x: ZigzagMonomial | Mapping[ZigzagMonomial, Fraction],
    target: ZigzagAlgebra | None = None,
) -> ZigzagElement:
    """Entrywise application of a verified morphism.

    Raises:
        UnsupportedCarrierError: If ``f`` fails :func:`check_morphism`.
    """
    if not check_morphism(f):
        raise UnsupportedCarrierError(f"{f.name} is not a curved DGA morphism")
    zz = target or ZigzagAlgebra(f.target)
    out: dict = {}
    for m, coefficient in _coerce(x).items():
        factors = [f.apply({e: Fraction(1)}) for e in m.entries]
        for entries, c in zz._expand_entries(factors):
            vec_accumulate(out, {ZigzagMonomial(m.k, m.n, entries): coefficient * c})
    return zz.normalize(out)


def monomial_to_grid(carrier: CurvedDGA, m: ZigzagMonomial, scalar: Fraction = Fraction(1)) -> dict[str, Any]:
    """JSON grid form ``{k, n, entries, scalar}``; units are omitted from ``entries``."""
    _, rows, _ = zigzag_layout(m.k, m.n)
    entries = []
    for s, key in enumerate(m.entries):
        if carrier.is_unit_key(key):
            continue
        i = rows[s]
        p = 0 if s == 0 else s - 1 - (i - 1) * (m.n + 1) + 1
        entries.append({"i": i, "p": p, "key": carrier.encode_key(key)})
    return {"k": m.k, "n": m.n, "entries": entries, "scalar": str(scalar)}


def monomial_from_grid(carrier: CurvedDGA, data: Mapping[str, Any]) -> tuple[ZigzagMonomial, Fraction]:
    """Inverse of :func:`monomial_to_grid`.

    Raises:
        InvalidElementError: If an entry position is outside the grid.
    """
    k, n = int(data["k"]), int(data["n"])
    entries = [carrier.unit_key] * (1 + k * (n + 1))
    for cell in data.get("entries", []):
        i, p = int(cell["i"]), int(cell["p"])
        if not ((i, p) == (0, 0) or (1 <= i <= k and 1 <= p <= n + 1)):
            raise InvalidElementError(f"slot ({i},{p}) is outside a ({k},{n}) zigzag")
        entries[slot_index(i, p, n)] = carrier.decode_key(cell["key"])
    return ZigzagMonomial(k, n, tuple(entries)), Fraction(str(data.get("scalar", "1")))
