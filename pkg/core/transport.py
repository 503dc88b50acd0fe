"""Paths, tangent fields, connections and parallel transport on the trivial bundle over ℝ^d.

Parallel sections satisfy ``s' + A(γ̇) s = 0``; :func:`parallel_transport`
integrates ``P'(t) = -A(γ(t))(γ̇(t)) P(t)`` with a fixed-step RK4 scheme that
restarts at every breakpoint of the path so piecewise-smooth paths keep full
order. :class:`TransportTable` caches ``P_{0→t}`` on a grid for the many
transport queries an iterated integral makes.
"""

from __future__ import annotations

import abc
import functools
import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import expm

from core.errors import IntegrationError, InvalidConnectionError
from core.graded import FormElement

LOGGER = logging.getLogger(__name__)

DEFAULT_STEP = 1e-3


def _merge_breakpoints(*groups: Sequence[float]) -> tuple[float, ...]:
    return tuple(sorted({float(b) for group in groups for b in group if 0.0 < b < 1.0}))


# ---------------------------------------------------------------------------
# Paths
# ---------------------------------------------------------------------------


class Path(abc.ABC):
    """A piecewise-smooth path ``γ: [0, 1] -> ℝ^d`` with vectorized position and velocity."""

    dimension: int
    breakpoints: tuple[float, ...] = ()

    @abc.abstractmethod
    def position(self, t: np.ndarray) -> np.ndarray:
        """Positions at times ``t`` of shape ``(B,)``, shape ``(B, d)``."""

    @abc.abstractmethod
    def velocity(self, t: np.ndarray) -> np.ndarray:
        """Velocities at times ``t``, shape ``(B, d)``."""

    @property
    def basepoint(self) -> np.ndarray:
        return self.position(np.zeros(1))[0]

    def velocity_error(self, samples: int = 64, h: float = 1e-6) -> float:
        """Largest gap between ``γ̇`` and a central difference of ``γ`` at interior samples."""
        t = np.linspace(0.05, 0.95, samples)
        t = t[np.all(np.abs(t[:, None] - np.asarray(self.breakpoints or (2.0,))[None, :]) > 2 * h, axis=1)]
        fd = (self.position(t + h) - self.position(t - h)) / (2 * h)
        return float(np.max(np.abs(fd - self.velocity(t))))


@dataclass(frozen=True)
class LinePath(Path):
    """Straight segment from ``start`` to ``end``; ``start == end`` gives a constant path."""

    start: tuple[float, ...]
    end: tuple[float, ...]

    @property
    def dimension(self) -> int:  # type: ignore[override]
        return len(self.start)

    def position(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)[:, None]
        a, b = np.asarray(self.start), np.asarray(self.end)
        return a + t * (b - a)

    def velocity(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(np.asarray(self.end) - np.asarray(self.start), (t.shape[0], len(self.start))).copy()


@dataclass(frozen=True)
class CirclePath(Path):
    """Arc of a circle in the ``(axes[0], axes[1])`` coordinate plane."""

    center: tuple[float, ...]
    radius: float = 1.0
    start_angle: float = 0.0
    sweep: float = math.pi
    axes: tuple[int, int] = (0, 1)

    @property
    def dimension(self) -> int:  # type: ignore[override]
        return len(self.center)

    def position(self, t: np.ndarray) -> np.ndarray:
        theta = self.start_angle + self.sweep * np.asarray(t, dtype=float)
        out = np.tile(np.asarray(self.center, dtype=float), (theta.shape[0], 1))
        out[:, self.axes[0]] += self.radius * np.cos(theta)
        out[:, self.axes[1]] += self.radius * np.sin(theta)
        return out

    def velocity(self, t: np.ndarray) -> np.ndarray:
        theta = self.start_angle + self.sweep * np.asarray(t, dtype=float)
        out = np.zeros((theta.shape[0], self.dimension))
        out[:, self.axes[0]] = -self.radius * self.sweep * np.sin(theta)
        out[:, self.axes[1]] = self.radius * self.sweep * np.cos(theta)
        return out


@dataclass(frozen=True)
class PolynomialPath(Path):
    """``γ(t) = Σ_j coefficients[j] t^j``."""

    coefficients: tuple[tuple[float, ...], ...]

    @property
    def dimension(self) -> int:  # type: ignore[override]
        return len(self.coefficients[0])

    def position(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        powers = t[:, None] ** np.arange(len(self.coefficients))[None, :]
        return powers @ np.asarray(self.coefficients, dtype=float)

    def velocity(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        c = np.asarray(self.coefficients, dtype=float)
        if len(c) == 1:
            return np.zeros((t.shape[0], c.shape[1]))
        powers = t[:, None] ** np.arange(len(c) - 1)[None, :]
        return powers @ (c[1:] * np.arange(1, len(c))[:, None])


class SampledPath(Path):
    """Path through dense samples, interpolated by a cubic spline."""

    def __init__(self, times: Sequence[float], points: Sequence[Sequence[float]]) -> None:
        times = np.asarray(times, dtype=float)
        points = np.asarray(points, dtype=float)
        if times[0] != 0.0 or times[-1] != 1.0:
            raise ValueError("sampled path times must span [0, 1]")
        self.dimension = points.shape[1]
        self.spline = CubicSpline(times, points, axis=0)
        self._derivative = self.spline.derivative()

    def position(self, t: np.ndarray) -> np.ndarray:
        return self.spline(np.asarray(t, dtype=float))

    def velocity(self, t: np.ndarray) -> np.ndarray:
        return self._derivative(np.asarray(t, dtype=float))


class PerturbedPath(Path):
    """``γ + ε X``."""

    def __init__(self, base: Path, field: TangentField, epsilon: float) -> None:
        self.base = base
        self.field = field
        self.epsilon = epsilon
        self.dimension = base.dimension
        self.breakpoints = _merge_breakpoints(base.breakpoints, field.breakpoints)

    def position(self, t: np.ndarray) -> np.ndarray:
        return self.base.position(t) + self.epsilon * self.field.value(t)

    def velocity(self, t: np.ndarray) -> np.ndarray:
        return self.base.velocity(t) + self.epsilon * self.field.derivative(t)


class StoppedPath(Path):
    """``γ(min(t, s))``: follows the base path until time s, then rests."""

    def __init__(self, base: Path, stop: float) -> None:
        self.base = base
        self.stop = float(stop)
        self.dimension = base.dimension
        self.breakpoints = _merge_breakpoints([b for b in base.breakpoints if b < stop], [stop])

    def position(self, t: np.ndarray) -> np.ndarray:
        return self.base.position(np.minimum(np.asarray(t, dtype=float), self.stop))

    def velocity(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return self.base.velocity(np.minimum(t, self.stop)) * (t < self.stop)[:, None]


def constant_path(point: Sequence[float]) -> LinePath:
    point = tuple(float(x) for x in point)
    return LinePath(point, point)


# ---------------------------------------------------------------------------
# Tangent fields along paths
# ---------------------------------------------------------------------------


class TangentField(abc.ABC):
    """A vector field ``X: [0, 1] -> ℝ^d`` along a path, with its t-derivative."""

    breakpoints: tuple[float, ...] = ()

    @abc.abstractmethod
    def value(self, t: np.ndarray) -> np.ndarray:
        """Shape ``(B, d)``."""

    @abc.abstractmethod
    def derivative(self, t: np.ndarray) -> np.ndarray:
        """Shape ``(B, d)``."""

    def at(self, t: float) -> np.ndarray:
        return self.value(np.asarray([t]))[0]


@dataclass(frozen=True)
class PolynomialField(TangentField):
    """``X(t) = Σ_j coefficients[j] t^j``; a single coefficient row is a constant field."""

    coefficients: tuple[tuple[float, ...], ...]

    def value(self, t: np.ndarray) -> np.ndarray:
        return PolynomialPath(self.coefficients).position(t)

    def derivative(self, t: np.ndarray) -> np.ndarray:
        return PolynomialPath(self.coefficients).velocity(t)


@dataclass(frozen=True)
class BumpField(TangentField):
    """``vector · φ((t - center) / width)`` with the smooth compactly supported bump φ."""

    vector: tuple[float, ...]
    center: float = 0.5
    width: float = 0.4

    def _bump(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        u = (np.asarray(t, dtype=float) - self.center) / self.width
        inside = np.abs(u) < 1.0
        safe = np.where(inside, u, 0.0)
        phi = np.where(inside, np.exp(-1.0 / (1.0 - safe**2)), 0.0)
        dphi = np.where(inside, phi * (-2.0 * safe) / (1.0 - safe**2) ** 2 / self.width, 0.0)
        return phi, dphi

    def value(self, t: np.ndarray) -> np.ndarray:
        phi, _ = self._bump(t)
        return phi[:, None] * np.asarray(self.vector)[None, :]

    def derivative(self, t: np.ndarray) -> np.ndarray:
        _, dphi = self._bump(t)
        return dphi[:, None] * np.asarray(self.vector)[None, :]


class StoppedField(TangentField):
    """``X(min(t, s))``, the pushforward of X under stopping at time s."""

    def __init__(self, base: TangentField, stop: float) -> None:
        self.base = base
        self.stop = float(stop)
        self.breakpoints = _merge_breakpoints([b for b in base.breakpoints if b < stop], [stop])

    def value(self, t: np.ndarray) -> np.ndarray:
        return self.base.value(np.minimum(np.asarray(t, dtype=float), self.stop))

    def derivative(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return self.base.derivative(np.minimum(t, self.stop)) * (t < self.stop)[:, None]


class StepField(TangentField):
    """``vector · [t >= s]``: the s-velocity of the stopped path family."""

    def __init__(self, vector: Sequence[float], stop: float) -> None:
        self.vector = np.asarray(vector, dtype=float)
        self.stop = float(stop)
        self.breakpoints = _merge_breakpoints([stop])

    def value(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return (t >= self.stop)[:, None] * self.vector[None, :]

    def derivative(self, t: np.ndarray) -> np.ndarray:
        return np.zeros((np.asarray(t).shape[0], self.vector.shape[0]))


class VelocityField(TangentField):
    """The path's own velocity ``γ̇`` as a field along it."""

    def __init__(self, path: Path, h: float = 1e-5) -> None:
        self.path = path
        self.h = h
        self.breakpoints = path.breakpoints

    def value(self, t: np.ndarray) -> np.ndarray:
        return self.path.velocity(t)

    def derivative(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return (self.path.velocity(t + self.h) - self.path.velocity(t - self.h)) / (2 * self.h)


# ---------------------------------------------------------------------------
# Connections
# ---------------------------------------------------------------------------


class ConnectionData:
    """Numeric form of a polynomial connection ``A`` and its curvature ``dA + A∧A``.

    Args:
        connection: Degree 1 matrix form on ℝ^d; the zero form is the flat connection.
        curvature: Its curvature form, usually ``MatrixFormCDGA.curvature_form``.

    Raises:
        InvalidConnectionError: If ``connection`` has a term of degree other than 1.
    """

    def __init__(self, connection: FormElement, curvature: FormElement) -> None:
        if any(len(s) != 1 for s in connection.terms):
            raise InvalidConnectionError("connection must be homogeneous of degree 1")
        self.dimension = connection.dimension
        self.rank = connection.rank
        self.connection = connection.to_float()
        self.curvature_form = curvature.to_float()
        self.is_flat = connection.is_zero()

    @classmethod
    def from_cdga(cls, inst: object) -> ConnectionData:
        return cls(inst.connection, inst.curvature_form)  # type: ignore[attr-defined]

    def components(self, points: np.ndarray) -> np.ndarray:
        """``A_a(x)`` for every coordinate a, shape ``(B, d, r, r)``."""
        points = np.asarray(points, dtype=float)
        out = np.zeros((points.shape[0], self.dimension, self.rank, self.rank))
        for (a,), coefficient in self.connection.terms.items():
            out[:, a] = coefficient.evaluate_array(points)
        return out

    def along(self, points: np.ndarray, velocities: np.ndarray) -> np.ndarray:
        """``A(x)(v)``, shape ``(B, r, r)``."""
        values = self.components(points)
        return np.einsum("ba,baij->bij", np.asarray(velocities, dtype=float), values)

    def curvature(self, points: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """``R(x)(u, v)``, shape ``(B, r, r)``."""
        points = np.asarray(points, dtype=float)
        out = np.zeros((points.shape[0], self.rank, self.rank))
        for (a, b), coefficient in self.curvature_form.terms.items():
            weight = u[:, a] * v[:, b] - u[:, b] * v[:, a]
            out += weight[:, None, None] * coefficient.evaluate_array(points)
        return out


# ---------------------------------------------------------------------------
# Transport
# ---------------------------------------------------------------------------


def _segments(a: float, b: float, breakpoints: Sequence[float], step: float) -> np.ndarray:
    """RK4 grid from a to b hitting every breakpoint strictly between them."""
    lo, hi = min(a, b), max(a, b)
    cuts = [lo] + [p for p in breakpoints if lo < p < hi] + [hi]
    grid = [np.asarray([lo])]
    for left, right in zip(cuts, cuts[1:]):
        steps = max(1, int(math.ceil((right - left) / step - 1e-9)))
        grid.append(np.linspace(left, right, steps + 1)[1:])
    nodes = np.concatenate(grid)
    return nodes if a <= b else nodes[::-1]


def _generator(conn: ConnectionData, path: Path, t: np.ndarray) -> np.ndarray:
    """``-A(γ(t))(γ̇(t))`` at times t, shape ``(B, r, r)``."""
    values = -conn.along(path.position(t), path.velocity(t))
    if not np.all(np.isfinite(values)):
        raise IntegrationError("connection produced nonfinite values along the path")
    return values


def _rk4(conn: ConnectionData, path: Path, nodes: np.ndarray) -> np.ndarray:
    """Transport matrices ``P_{nodes[0] → nodes[i]}`` for every node, shape ``(N, r, r)``."""
    left, right = nodes[:-1], nodes[1:]
    h = right - left
    # one-sided evaluation keeps each step inside its smooth piece
    inside = 1e-12 * np.sign(h)
    m0 = _generator(conn, path, left + inside)
    mh = _generator(conn, path, left + h / 2)
    m1 = _generator(conn, path, right - inside)
    out = np.empty((len(nodes), conn.rank, conn.rank))
    out[0] = np.eye(conn.rank)
    current = out[0]
    for i in range(len(h)):
        k1 = m0[i] @ current
        k2 = mh[i] @ (current + h[i] / 2 * k1)
        k3 = mh[i] @ (current + h[i] / 2 * k2)
        k4 = m1[i] @ (current + h[i] * k3)
        current = current + h[i] / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[i + 1] = current
    if not np.all(np.isfinite(out)):
        LOGGER.warning("transport diverged on %s after %d steps", type(path).__name__, len(h))
        raise IntegrationError("transport integration diverged")
    return out


def parallel_transport(
    conn: ConnectionData, path: Path, a: float = 0.0, b: float = 1.0, step: float = DEFAULT_STEP
) -> np.ndarray:
    """``P_{a→b}`` along the path; ``a > b`` integrates backwards.

    Raises:
        IntegrationError: On nonfinite connection values.
    """
    if not (0.0 <= a <= 1.0 and 0.0 <= b <= 1.0):
        raise ValueError(f"transport endpoints must lie in [0, 1], got {a}, {b}")
    if a == b or conn.is_flat:
        return np.eye(conn.rank)
    return _rk4(conn, path, _segments(a, b, path.breakpoints, step))[-1]


class TransportTable:
    """``P_{0→t}`` on an RK4 grid over [0, 1], queried at arbitrary times.

    A query at t takes one partial RK4 step from the grid node below t, so
    values carry the integrator's full order at every time.
    """

    def __init__(self, conn: ConnectionData, path: Path, step: float = DEFAULT_STEP) -> None:
        self.conn = conn
        self.path = path
        self.rank = conn.rank
        self.flat = conn.is_flat
        if not self.flat:
            self.nodes = _segments(0.0, 1.0, path.breakpoints, step)
            self.values = _rk4(conn, path, self.nodes)

    def from_zero(self, t: np.ndarray) -> np.ndarray:
        """``P_{0→t}`` for times of shape ``(B,)``, shape ``(B, r, r)``."""
        t = np.asarray(t, dtype=float)
        if self.flat:
            return np.broadcast_to(np.eye(self.rank), (t.shape[0], self.rank, self.rank)).copy()
        index = np.clip(np.searchsorted(self.nodes, t, side="right") - 1, 0, len(self.nodes) - 1)
        base = self.nodes[index]
        h = t - base
        start = self.values[index]
        moving = h > 0
        out = start.copy()
        if np.any(moving):
            tm, hm, p = base[moving], h[moving], start[moving]
            m0 = _generator(self.conn, self.path, tm + 1e-12)
            mh = _generator(self.conn, self.path, tm + hm / 2)
            m1 = _generator(self.conn, self.path, tm + hm - 1e-12 * (hm > 1e-12))
            hh = hm[:, None, None]
            k1 = m0 @ p
            k2 = mh @ (p + hh / 2 * k1)
            k3 = mh @ (p + hh / 2 * k2)
            k4 = m1 @ (p + hh * k3)
            out[moving] = p + hh / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        return out

    def between(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """``P_{a→b} = P_{0→b} P_{0→a}^{-1}``, batched over pairs of times."""
        if self.flat:
            return self.from_zero(np.asarray(a, dtype=float))
        return self.from_zero(b) @ np.linalg.inv(self.from_zero(a))


@functools.lru_cache(maxsize=8)
def _gauss(order: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return (nodes + 1.0) / 2.0, weights / 2.0


def _interval_rule(a: float, b: float, breakpoints: Sequence[float], order: int) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = min(a, b), max(a, b)
    cuts = [lo] + [p for p in breakpoints if lo < p < hi] + [hi]
    x, w = _gauss(order)
    nodes = np.concatenate([left + (right - left) * x for left, right in zip(cuts, cuts[1:])])
    weights = np.concatenate([(right - left) * w for left, right in zip(cuts, cuts[1:])])
    return nodes, weights


def transport_derivative(
    conn: ConnectionData,
    path: Path,
    field: TangentField,
    a: float = 0.0,
    b: float = 1.0,
    order: int = 16,
    step: float = DEFAULT_STEP,
    table: TransportTable | None = None,
) -> np.ndarray:
    """Covariant derivative of ``P_{a→b}`` in the direction X: ``∫_a^b P_{t→b} R(γ̇, X) P_{a→t} dt``."""
    if conn.is_flat or a == b:
        return np.zeros((conn.rank, conn.rank))
    table = table or TransportTable(conn, path, step)
    t, w = _interval_rule(a, b, _merge_breakpoints(path.breakpoints, field.breakpoints), order)
    curvature = conn.curvature(path.position(t), path.velocity(t), field.value(t))
    p0t = table.from_zero(t)
    p0a = table.from_zero(np.asarray([a]))[0]
    p0b = table.from_zero(np.asarray([b]))[0]
    inner = np.linalg.solve(p0t, curvature @ p0t)
    total = np.einsum("b,bij->ij", w, inner)
    value = p0b @ total @ np.linalg.inv(p0a)
    return value if a <= b else -value


def straight_adjustment(conn: ConnectionData, source: np.ndarray, target: np.ndarray, step: float = DEFAULT_STEP) -> np.ndarray:
    """Transport from the fiber at ``source`` to the fiber at ``target`` along the segment between them."""
    return parallel_transport(conn, LinePath(tuple(target), tuple(source)), 1.0, 0.0, step)


def transport_derivative_fd(
    conn: ConnectionData,
    path: Path,
    field: TangentField,
    a: float = 0.0,
    b: float = 1.0,
    h: float = 1e-4,
    step: float = DEFAULT_STEP,
) -> np.ndarray:
    """Central difference of ``Adj_b(ε) P^ε_{a→b} Adj_a(ε)^{-1}`` over the family ``γ + εX``."""
    if h <= 0:
        raise IntegrationError(f"finite-difference step must be positive, got {h}")
    ta, tb = np.asarray([a]), np.asarray([b])
    values = []
    for epsilon in (h, -h):
        moved = PerturbedPath(path, field, epsilon)
        adj_a = straight_adjustment(conn, moved.position(ta)[0], path.position(ta)[0], step)
        adj_b = straight_adjustment(conn, moved.position(tb)[0], path.position(tb)[0], step)
        values.append(adj_b @ parallel_transport(conn, moved, a, b, step) @ np.linalg.inv(adj_a))
    return (values[0] - values[1]) / (2 * h)


def liouville_gap(conn: ConnectionData, path: Path, a: float = 0.0, b: float = 1.0, step: float = DEFAULT_STEP, order: int = 16) -> float:
    """``|det P_{a→b} - exp(-∫ tr A(γ̇))|``."""
    t, w = _interval_rule(a, b, path.breakpoints, order)
    trace = np.trace(conn.along(path.position(t), path.velocity(t)), axis1=1, axis2=2)
    integral = float(np.dot(w, trace)) * (1 if b >= a else -1)
    return abs(float(np.linalg.det(parallel_transport(conn, path, a, b, step))) - math.exp(-integral))


def constant_line_transport_gap(conn: ConnectionData, start: Sequence[float], end: Sequence[float], step: float = DEFAULT_STEP) -> float:
    """Gap to the closed form ``exp(-A(γ̇))`` on a segment; exact only for constant connections."""
    line = LinePath(tuple(start), tuple(end))
    generator = conn.along(line.position(np.zeros(1)), line.velocity(np.zeros(1)))[0]
    return float(np.max(np.abs(parallel_transport(conn, line, 0.0, 1.0, step) - expm(-generator))))


def composition_gap(conn: ConnectionData, path: Path, t1: float, t2: float, step: float = DEFAULT_STEP) -> float:
    """``|P_{t1→t2} P_{0→t1} - P_{0→t2}|``."""
    left = parallel_transport(conn, path, t1, t2, step) @ parallel_transport(conn, path, 0.0, t1, step)
    return float(np.max(np.abs(left - parallel_transport(conn, path, 0.0, t2, step))))
