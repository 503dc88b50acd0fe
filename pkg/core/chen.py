"""The curved Chen map It: zigzags of matrix forms to forms on path space.

A zigzag monomial over ``Ω(ℝ^d, Mat_r)`` is evaluated on a path γ and tangent
fields ``X_1..X_q`` by integrating over ``Δⁿ`` the path-ordered product

    ω_(0,0)(0) · P_{t→0} · ω_(1,1)(t_1) · P · … · ω_(k,n+1)(0)

where consecutive slots are joined by parallel transport between their times.
Each slot form is pulled back to an element of the exterior algebra on the
formal generators ``dt_1..dt_n, θ_1..θ_q`` by sending ``dx^a`` to
``γ̇^a(t_c) dt_c + Σ_j X_j^a(t_c) θ_j`` (endpoint columns get no ``dt``); the
coefficient of ``dt_1 ∧ … ∧ dt_n ∧ θ_1 ∧ … ∧ θ_q`` is the integrand.

Because ``P_{b→a} = P_{0→a} P_{0→b}^{-1}`` and both path ends sit at time 0,
the product equals the path-ordered product of the conjugated slot values
``P_{0→t}^{-1} ω(t) P_{0→t}``, so unit slots drop out.

The module also carries the numeric identity checks between It, the zigzag
differential and product, ev₀ pullbacks, the shrink homotopy and the bar
complex.
"""

from __future__ import annotations

import collections
import functools
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from core.bar import BarMonomial, _coerce_bar, col_collapse, require_commutative_flat
from core.curved_dga import MatrixFormCDGA
from core.errors import ArityError, IntegrationError, UnsupportedCarrierError
from core.graded import inversion_count
from core.linear import Key, Vec
from core.quadrature import DEFAULT_ORDER, gauss_legendre, split_simplex_rule
from core.transport import (
    DEFAULT_STEP,
    ConnectionData,
    Path,
    PerturbedPath,
    StepField,
    StoppedField,
    StoppedPath,
    TangentField,
    TransportTable,
    constant_path,
    straight_adjustment,
)
from core.zigzag import ZigzagAlgebra, ZigzagMonomial, _coerce

LOGGER = logging.getLogger(__name__)

Exterior = dict  # generator mask -> (M, r, r) coefficient array


@functools.lru_cache(maxsize=None)
def wedge_sign_table(generators: int) -> np.ndarray:
    """``table[a, b]`` is the sign of ``e_a ∧ e_b = ± e_{a|b}``, or 0 when the masks overlap."""
    size = 1 << generators
    table = np.zeros((size, size), dtype=int)
    for a in range(size):
        for b in range(size):
            if a & b:
                continue
            swaps = sum(
                1 for i in range(generators) if a >> i & 1 for j in range(i) if b >> j & 1
            )
            table[a, b] = -1 if swaps % 2 else 1
    return table


def _wedge(left: Exterior, right: Exterior, table: np.ndarray) -> Exterior:
    out: Exterior = {}
    for ma, va in left.items():
        for mb, vb in right.items():
            sign = table[ma, mb]
            if not sign:
                continue
            product = va @ vb if sign > 0 else -(va @ vb)
            mask = ma | mb
            out[mask] = out[mask] + product if mask in out else product
    return out


@dataclass(frozen=True)
class PathSpaceFormEvaluator:
    """An End(E)_{γ(0)}-valued form on path space, given by its values on tangent fields.

    Attributes:
        arity: Number of tangent fields the form takes.
        evaluate: ``(path, fields) -> r x r`` matrix.
        name: Label used in reports.
    """

    arity: int
    evaluate: Callable[[Path, Sequence[TangentField]], np.ndarray]
    name: str = "form"

    def __call__(self, path: Path, fields: Sequence[TangentField]) -> np.ndarray:
        if len(fields) != self.arity:
            raise ArityError(f"{self.name} takes {self.arity} tangent fields, got {len(fields)}")
        return np.asarray(self.evaluate(path, fields))


@dataclass
class NumericCheck:
    """Outcome of one numeric identity check."""

    name: str
    max_error: float
    tolerance: float
    trials: int = 1
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.max_error)) and self.max_error <= self.tolerance

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "max_error": self.max_error,
            "tolerance": self.tolerance,
            "trials": self.trials,
            "passed": self.passed,
            "details": self.details,
        }


def relative_gap(left: np.ndarray, right: np.ndarray) -> float:
    """``max |left - right|`` over ``max(1, |left|, |right|)``."""
    left, right = np.asarray(left, dtype=float), np.asarray(right, dtype=float)
    scale = max(1.0, float(np.max(np.abs(left), initial=0.0)), float(np.max(np.abs(right), initial=0.0)))
    return float(np.max(np.abs(left - right), initial=0.0)) / scale


def _breakpoints(path: Path, fields: Sequence[TangentField]) -> tuple[float, ...]:
    return tuple(sorted(set(path.breakpoints).union(*(f.breakpoints for f in fields))))


class ChenEvaluator:
    """Numeric It for zigzags over a matrix-form carrier.

    Args:
        carrier: The curved DGA of matrix forms whose connection drives transport.
        step: RK4 step for parallel transport.
        order: Gauss–Legendre order per simplex axis.
        h: Central-difference step for covariant derivatives.
    """

    def __init__(
        self,
        carrier: MatrixFormCDGA,
        step: float = DEFAULT_STEP,
        order: int = DEFAULT_ORDER,
        h: float = 1e-4,
        zigzag: ZigzagAlgebra | None = None,
    ) -> None:
        if not isinstance(carrier, MatrixFormCDGA):
            raise UnsupportedCarrierError("It is defined for matrix-form carriers only")
        self.carrier = carrier
        self.connection = ConnectionData.from_cdga(carrier)
        self.step = step
        self.order = order
        self.h = h
        self.zigzag = zigzag or ZigzagAlgebra(carrier)
        self._tables: collections.OrderedDict[int, tuple[Path, TransportTable]] = collections.OrderedDict()

    def refined(self) -> ChenEvaluator:
        """Same evaluator with half the ODE step and twice the quadrature order."""
        return ChenEvaluator(self.carrier, self.step / 2, self.order * 2, self.h, self.zigzag)

    # -- transport cache ----------------------------------------------------

    def table(self, path: Path) -> TransportTable:
        hit = self._tables.get(id(path))
        if hit is not None and hit[0] is path:
            self._tables.move_to_end(id(path))
            return hit[1]
        table = TransportTable(self.connection, path, self.step)
        self._tables[id(path)] = (path, table)
        if len(self._tables) > 64:
            self._tables.popitem(last=False)
        return table

    # -- slot values --------------------------------------------------------

    def _slot_value(
        self,
        key: Key,
        positions: np.ndarray,
        tangents: Sequence[tuple[int, np.ndarray]],
    ) -> Exterior:
        """Pullback of one basis form to the exterior algebra, coefficients ``(M, r, r)``."""
        subset, matrix, exponent = self.carrier.numeric_key(key)
        scalar = np.prod(positions ** np.asarray(exponent, dtype=float), axis=1)
        base = scalar[:, None, None] * matrix[None, :, :]
        degree = len(subset)
        if degree == 0:
            return {0: base}
        out: Exterior = {}
        for chosen in itertools.combinations(tangents, degree):
            block = np.stack(
                [np.stack([vectors[:, a] for _, vectors in chosen], axis=-1) for a in subset], axis=1
            )
            determinant = np.linalg.det(block)
            if not np.any(determinant):
                continue
            mask = sum(1 << g for g, _ in chosen)
            out[mask] = determinant[:, None, None] * base
        return out

    def _integrate(
        self,
        entries: Sequence[Key],
        columns: Sequence[int],
        n: int,
        path: Path,
        fields: Sequence[TangentField],
        transport: bool = True,
    ) -> np.ndarray:
        """``∫_{Δⁿ}`` of the path-ordered product of ``entries`` sitting in ``columns`` (0..n+1)."""
        q = len(fields)
        generators = n + q
        table = wedge_sign_table(generators)
        points, weights = split_simplex_rule(n, self.order, _breakpoints(path, fields))
        count = points.shape[0]
        rank = self.carrier.rank
        unit = self.carrier.unit_key
        transports = self.table(path) if transport and not self.connection.is_flat else None
        per_column: dict[int, tuple] = {}

        def column_data(c: int) -> tuple:
            if c not in per_column:
                if c == 0:
                    times = np.zeros(count)
                elif c == n + 1:
                    times = np.ones(count)
                else:
                    times = points[:, c - 1]
                tangents = [(n + j, f.value(times)) for j, f in enumerate(fields)]
                if 0 < c <= n:
                    tangents.insert(0, (c - 1, path.velocity(times)))
                frame = transports.from_zero(times) if transports is not None else None
                per_column[c] = (path.position(times), tangents, frame)
            return per_column[c]

        product: Exterior = {0: np.broadcast_to(np.eye(rank), (count, rank, rank))}
        for key, c in zip(entries, columns):
            if key == unit:
                continue
            positions, tangents, frame = column_data(c)
            value = self._slot_value(key, positions, tangents)
            if frame is not None:
                value = {mask: np.linalg.solve(frame, v @ frame) for mask, v in value.items()}
            product = _wedge(product, value, table)
            if not product:
                return np.zeros((rank, rank))
        top = product.get((1 << generators) - 1)
        if top is None:
            return np.zeros((rank, rank))
        result = np.tensordot(weights, top, axes=(0, 0))
        if not np.all(np.isfinite(result)):
            raise IntegrationError("iterated integral produced nonfinite values")
        return result

    # -- It -----------------------------------------------------------------

    def evaluate_monomial(self, m: ZigzagMonomial, path: Path, fields: Sequence[TangentField]) -> np.ndarray:
        """It of a single (possibly unnormalized) monomial.

        Raises:
            ArityError: If the monomial's degree differs from ``len(fields)``.
        """
        degree = self.zigzag.degree(m)
        if degree != len(fields):
            raise ArityError(f"a degree {degree} zigzag takes {degree} tangent fields, got {len(fields)}")
        return self._integrate(m.entries, m.columns, m.n, path, fields)

    def evaluate_It(
        self, x: ZigzagMonomial | Mapping[ZigzagMonomial, Fraction], path: Path, fields: Sequence[TangentField]
    ) -> np.ndarray:
        total = np.zeros((self.carrier.rank, self.carrier.rank))
        for m, coefficient in _coerce(x).items():
            total = total + float(coefficient) * self.evaluate_monomial(m, path, fields)
        return total

    def as_form(self, x: ZigzagMonomial | Mapping[ZigzagMonomial, Fraction], name: str = "It(x)") -> PathSpaceFormEvaluator:
        terms = _coerce(x)
        degrees = {self.zigzag.degree(m) for m in terms}
        if len(degrees) > 1:
            raise ArityError(f"element mixes degrees {sorted(degrees)}")
        arity = degrees.pop() if degrees else 0
        return PathSpaceFormEvaluator(arity, lambda path, fields: self.evaluate_It(terms, path, fields), name)

    def face_integral(self, m: ZigzagMonomial, merge: int, path: Path, fields: Sequence[TangentField]) -> np.ndarray:
        """Integral of m's integrand over the face ``t_merge = t_{merge+1}`` of Δⁿ (``t_0 = 0``, ``t_{n+1} = 1``)."""
        columns = [c if c <= merge else c - 1 for c in m.columns]
        return self._integrate(m.entries, columns, m.n - 1, path, fields)

    def scalar_bar_It(
        self, x: BarMonomial | Mapping[BarMonomial, Fraction], path: Path, fields: Sequence[TangentField]
    ) -> np.ndarray:
        """Classical Chen integral of a bar element over a scalar flat carrier.

        Raises:
            UnsupportedCarrierError: If the carrier is not scalar and flat.
        """
        require_commutative_flat(self.carrier)
        total = np.zeros((1, 1))
        for bar, coefficient in _coerce_bar(x).items():
            degree = sum(self.carrier.degree(e) for e in bar.entries) - bar.n
            if degree != len(fields):
                raise ArityError(f"a degree {degree} bar element takes {degree} tangent fields")
            columns = list(range(bar.n + 2))
            total = total + float(coefficient) * self._integrate(bar.entries, columns, bar.n, path, fields, transport=False)
        return total


def ev0_pullback(carrier: MatrixFormCDGA, form: Vec | Any, name: str = "ev0*ω") -> PathSpaceFormEvaluator:
    """``ev₀^* ω``: the form evaluated at ``γ(0)`` on the fields' values at t = 0."""
    vec = carrier.expand(form)
    degrees = {carrier.degree(k) for k in vec}
    arity = degrees.pop() if len(degrees) == 1 else 0
    evaluator = ChenEvaluator(carrier)

    def evaluate(path: Path, fields: Sequence[TangentField]) -> np.ndarray:
        zero = np.zeros(1)
        tangents = [(j, f.value(zero)) for j, f in enumerate(fields)]
        table = wedge_sign_table(len(fields))
        total = np.zeros((carrier.rank, carrier.rank))
        for key, coefficient in vec.items():
            value = evaluator._slot_value(key, path.position(zero), tangents)
            top = _wedge({0: np.eye(carrier.rank)[None]}, value, table).get((1 << len(fields)) - 1)
            if top is not None:
                total = total + float(coefficient) * top[0]
        return total

    return PathSpaceFormEvaluator(arity, evaluate, name)


# ---------------------------------------------------------------------------
# Covariant derivatives on path space
# ---------------------------------------------------------------------------


def covariant_derivative_fd(
    form: PathSpaceFormEvaluator,
    path: Path,
    direction: TangentField,
    rest: Sequence[TangentField],
    connection: ConnectionData,
    h: float = 1e-4,
    step: float = DEFAULT_STEP,
) -> np.ndarray:
    """Central difference of ``s ↦ Adj(s) F(γ + sX; rest) Adj(s)^{-1}`` at s = 0.

    ``Adj(s)`` transports the fiber at ``γ(0) + sX(0)`` back to ``γ(0)`` along
    the straight segment.

    Raises:
        IntegrationError: If ``h`` is not positive.
    """
    if h <= 0:
        raise IntegrationError(f"finite-difference step must be positive, got {h}")
    base = path.basepoint
    values = []
    for s in (h, -h):
        moved = PerturbedPath(path, direction, s)
        value = form(moved, rest)
        adjust = straight_adjustment(connection, moved.basepoint, base, step)
        values.append(adjust @ value @ np.linalg.inv(adjust))
    return (values[0] - values[1]) / (2 * h)


def covariant_exterior_derivative(
    form: PathSpaceFormEvaluator,
    path: Path,
    fields: Sequence[TangentField],
    connection: ConnectionData,
    h: float = 1e-4,
    step: float = DEFAULT_STEP,
) -> np.ndarray:
    """``(∇̃F)(X_0..X_q) = Σ_i (-1)^i ∇_{X_i} F(X_0..X̂_i..X_q)`` for path-independent fields."""
    if len(fields) != form.arity + 1:
        raise ArityError(f"∇̃ of a {form.arity}-form takes {form.arity + 1} fields, got {len(fields)}")
    total: np.ndarray | None = None
    for i, direction in enumerate(fields):
        rest = list(fields[:i]) + list(fields[i + 1:])
        term = covariant_derivative_fd(form, path, direction, rest, connection, h, step)
        term = term if i % 2 == 0 else -term
        total = term if total is None else total + term
    return total


# ---------------------------------------------------------------------------
# Identity checks
# ---------------------------------------------------------------------------


def check_chain_map(
    ev: ChenEvaluator,
    x: Mapping[ZigzagMonomial, Fraction],
    path: Path,
    fields: Sequence[TangentField],
    tolerance: float = 1e-3,
) -> NumericCheck:
    """``∇̃ It(x) = It(D_z x)`` on one path and field set."""
    left = covariant_exterior_derivative(ev.as_form(x), path, fields, ev.connection, ev.h, ev.step)
    right = ev.evaluate_It(ev.zigzag.D_z(x), path, fields)
    gap = relative_gap(left, right)
    LOGGER.debug("chain map on %d terms: gap %.3e", len(_coerce(x)), gap)
    return NumericCheck("chain_map", gap, tolerance, details={"terms": len(_coerce(x))})


def wedge_values(
    left: PathSpaceFormEvaluator,
    right: PathSpaceFormEvaluator,
    path: Path,
    fields: Sequence[TangentField],
) -> np.ndarray:
    """``(F ∧ G)(X_1..X_{p+q})``: signed sum over splittings of the fields, matrix product on values."""
    p = left.arity
    total: np.ndarray | None = None
    for chosen in itertools.combinations(range(len(fields)), p):
        others = [i for i in range(len(fields)) if i not in chosen]
        sign = -1 if inversion_count(list(chosen) + others) % 2 else 1
        value = sign * (left(path, [fields[i] for i in chosen]) @ right(path, [fields[i] for i in others]))
        total = value if total is None else total + value
    return total


def check_algebra_map(
    ev: ChenEvaluator,
    x: Mapping[ZigzagMonomial, Fraction],
    y: Mapping[ZigzagMonomial, Fraction],
    path: Path,
    fields: Sequence[TangentField],
    tolerance: float = 1e-3,
) -> NumericCheck:
    """``It(x ⊙ y) = It(x) ∧ It(y)``."""
    left = ev.evaluate_It(ev.zigzag.shuffle(x, y), path, fields)
    right = wedge_values(ev.as_form(x), ev.as_form(y), path, fields)
    return NumericCheck("algebra_map", relative_gap(left, right), tolerance)


def boundary_term_check(
    ev: ChenEvaluator,
    m: ZigzagMonomial,
    path: Path,
    fields: Sequence[TangentField],
    tolerance: float = 1e-8,
) -> NumericCheck:
    """``It(b_z m)`` against the signed face integrals of m's integrand over ``∂Δⁿ``."""
    left = ev.evaluate_It(ev.zigzag.b_z(m), path, fields)
    right = np.zeros_like(left)
    if m.n:
        for merge in range(m.n + 1):
            sign = -1 if (m.n + merge) % 2 else 1
            right = right + sign * ev.face_integral(m, merge, path, fields)
    return NumericCheck("boundary_term", relative_gap(left, right), tolerance, details={"faces": m.n + 1 if m.n else 0})


def quotient_invariance_check(
    ev: ChenEvaluator,
    raw: ZigzagMonomial,
    path: Path,
    fields: Sequence[TangentField],
    tolerance: float = 1e-6,
) -> NumericCheck:
    """It is constant on the classes of unit insertion and sliding through units."""
    left = ev.evaluate_monomial(raw, path, fields)
    right = ev.evaluate_It(ev.zigzag.normalize(raw), path, fields)
    return NumericCheck("quotient_invariance", relative_gap(left, right), tolerance)


def triangle_check(
    ev: ChenEvaluator,
    x: Mapping[ZigzagMonomial, Fraction],
    path: Path,
    fields: Sequence[TangentField],
    tolerance: float = 1e-3,
) -> NumericCheck:
    """It of a zigzag against the classical Chen integral of its column collapse.

    Raises:
        UnsupportedCarrierError: On a non-scalar or curved carrier.
    """
    require_commutative_flat(ev.carrier)
    left = ev.evaluate_It(x, path, fields)
    right = ev.scalar_bar_It(col_collapse(ev.carrier, x), path, fields)
    return NumericCheck("triangle", relative_gap(left, right), tolerance)


def ev0_triangle_check(
    ev: ChenEvaluator, form: Vec, path: Path, fields: Sequence[TangentField], tolerance: float = 1e-6
) -> NumericCheck:
    """``It(η(ω)) = ev₀^* ω``."""
    left = ev.evaluate_It(ev.zigzag.eta(form), path, fields)
    right = ev0_pullback(ev.carrier, form)(path, fields)
    return NumericCheck("ev0_triangle", relative_gap(left, right), tolerance)


def alternation_check(
    ev: ChenEvaluator,
    x: Mapping[ZigzagMonomial, Fraction],
    path: Path,
    fields: Sequence[TangentField],
    tolerance: float = 1e-8,
) -> NumericCheck:
    """Swapping the first two fields flips the sign of It."""
    if len(fields) < 2:
        return NumericCheck("alternation", 0.0, tolerance, trials=0)
    swapped = [fields[1], fields[0]] + list(fields[2:])
    left = ev.evaluate_It(x, path, fields)
    right = -ev.evaluate_It(x, path, swapped)
    return NumericCheck("alternation", relative_gap(left, right), tolerance)


def _stopped_fields(path: Path, fields: Sequence[TangentField], s: float) -> list[TangentField]:
    velocity = path.velocity(np.asarray([s]))[0]
    return [StepField(velocity, s)] + [StoppedField(f, s) for f in fields]


def shrink_homotopy_check(
    ev: ChenEvaluator,
    x: Mapping[ZigzagMonomial, Fraction],
    path: Path,
    fields: Sequence[TangentField],
    s_order: int = 12,
    tolerance: float = 1e-2,
) -> NumericCheck:
    """``E(γ) - E(const γ(0)) = h∇̃E + ∇̃hE`` for ``E = It(x)``, h the stopping homotopy.

    ``h`` integrates over s in [0, 1] the contraction of a form with the
    s-velocity of the stopped paths ``γ(min(t, s))``.
    """
    form = ev.as_form(x)
    if form.arity < 1:
        raise ArityError("the shrink homotopy check needs a form of positive degree")
    if form.arity != len(fields):
        raise ArityError(f"{form.name} takes {form.arity} fields, got {len(fields)}")
    nodes, weights = gauss_legendre(s_order)
    derivative = ev.as_form(ev.zigzag.D_z(x), "It(D_z x)")

    def homotopy(inner: PathSpaceFormEvaluator) -> PathSpaceFormEvaluator:
        def evaluate(p: Path, vectors: Sequence[TangentField]) -> np.ndarray:
            total = np.zeros((ev.carrier.rank, ev.carrier.rank))
            for s, w in zip(nodes, weights):
                total = total + w * inner(StoppedPath(p, s), _stopped_fields(p, vectors, s))
            return total

        return PathSpaceFormEvaluator(inner.arity - 1, evaluate, f"h({inner.name})")

    start = path.basepoint
    left = form(path, fields) - form(constant_path(start), [StoppedField(f, 0.0) for f in fields])
    h_of_derivative = homotopy(derivative)(path, fields)
    derivative_of_h = covariant_exterior_derivative(homotopy(form), path, fields, ev.connection, ev.h, ev.step)
    return NumericCheck("shrink_homotopy", relative_gap(left, h_of_derivative + derivative_of_h), tolerance)


def convergence_gate(
    ev: ChenEvaluator,
    x: Mapping[ZigzagMonomial, Fraction],
    path: Path,
    fields: Sequence[TangentField],
    tolerance: float = 1e-4,
) -> NumericCheck:
    """Halving the ODE step and doubling the quadrature order moves It by less than the tolerance."""
    coarse = ev.evaluate_It(x, path, fields)
    fine = ev.refined().evaluate_It(x, path, fields)
    LOGGER.debug("convergence gate at step %g, order %d", ev.step, ev.order)
    return NumericCheck(
        "convergence_gate",
        relative_gap(coarse, fine),
        tolerance,
        details={"step": ev.step, "order": ev.order},
    )


def refinement_check(
    name: str,
    run: Callable[[ChenEvaluator], NumericCheck],
    ev: ChenEvaluator,
    tolerance: float = 1e-4,
) -> NumericCheck:
    """Rerun an identity check on ``ev.refined()``.

    The refined error is held to the larger of the coarse error and ``tolerance``,
    so a check whose error grows under refinement fails.
    """
    coarse = run(ev)
    fine = run(ev.refined())
    LOGGER.debug("%s under refinement: %.3e -> %.3e", name, coarse.max_error, fine.max_error)
    return NumericCheck(
        f"{name}_refinement",
        fine.max_error,
        max(coarse.max_error, tolerance),
        details={"coarse": coarse.max_error, "fine": fine.max_error, "step": ev.step, "order": ev.order},
    )
