"""The three verification suites behind the CLI.

Each suite is a list of named tasks. A task draws its samples from its own
generator seeded by ``(config.seed, crc32(task name))``, so results do not
depend on the order in which the worker pool finishes them; the report lists
tasks in declaration order.

Usage:
    runner = SuiteRunner(load_config("fixtures/default_config.json"))
    report = runner.run("verify-zigzag")
    print(format_text_report(report))
"""

from __future__ import annotations

import logging
import math
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from application.config import MatrixSection, SuiteConfig, TensorSection
from application.report import CheckResult, Report
from core.bar import (
    bar_degree,
    bar_differential,
    bar_shuffle,
    col_collapse,
    sample_bar_monomial,
)
from core.chen import (
    ChenEvaluator,
    NumericCheck,
    alternation_check,
    boundary_term_check,
    check_algebra_map,
    check_chain_map,
    convergence_gate,
    covariant_exterior_derivative,
    ev0_pullback,
    ev0_triangle_check,
    quotient_invariance_check,
    refinement_check,
    relative_gap,
    shrink_homotopy_check,
    triangle_check,
)
from core.cohomology import (
    TruncationWindow,
    curved_cohomology,
    is_curved_closed,
    is_curved_exact,
    maximal_subdga_cohomology,
)
from core.curved_dga import (
    CurvedDGA,
    DGAMorphismWitness,
    MatrixFormCDGA,
    TensorCDGA,
    TensorElement,
    check_curved_dga_axioms,
    example_connection,
    example_curved_closed_form,
    identity_witness,
    make_matrix_form_cdga,
    make_tensor_algebra_cdga,
    perturbation_witness,
    scalar_inclusion_witness,
)
from core.errors import CurvedZigzagError, InvalidElementError, UnsupportedCarrierError
from core.graded import FormElement
from core.linear import vec_add, vec_sub
from core.stokes import fiber_integration_stokes_check, sample_product_form
from core.transport import (
    CirclePath,
    ConnectionData,
    LinePath,
    Path,
    PolynomialField,
    PolynomialPath,
    TangentField,
    composition_gap,
    constant_line_transport_gap,
    liouville_gap,
    transport_derivative,
    transport_derivative_fd,
)
from core.zigzag import ZigzagAlgebra, ZigzagElement, ZigzagMonomial, zz_map

LOGGER = logging.getLogger(__name__)

SUITES = ("verify-zigzag", "verify-pathspace", "cohomology")


@dataclass
class TaskOutcome:
    checks: list[CheckResult]
    tables: dict[str, Any] = field(default_factory=dict)


Task = tuple[str, Callable[[np.random.Generator], TaskOutcome]]


# ---------------------------------------------------------------------------
# Carriers and fixtures
# ---------------------------------------------------------------------------


def matrix_carrier(section: MatrixSection) -> MatrixFormCDGA:
    """The matrix-form carrier a config section names."""
    if section.connection == "example":
        return make_matrix_form_cdga(2, 2, example_connection(), name="matrix-forms")
    return make_matrix_form_cdga(section.dimension, section.rank, name="flat-matrix-forms")


def tensor_carrier(section: TensorSection) -> TensorCDGA:
    if section.letter is None:
        return make_tensor_algebra_cdga(section.dv, TensorElement.zero(section.dv))
    return make_tensor_algebra_cdga(section.dv, TensorElement.basis(section.dv, section.letter))


def scalar_carrier(dimension: int = 2) -> MatrixFormCDGA:
    return make_matrix_form_cdga(dimension, 1, name="scalar-forms")


def random_path(rng: np.random.Generator, dimension: int) -> Path:
    """A line, circle arc or quadratic path inside the unit box."""
    kind = int(rng.integers(0, 3))
    if kind == 0:
        return LinePath(tuple(rng.uniform(-1, 1, dimension)), tuple(rng.uniform(-1, 1, dimension)))
    if kind == 1 and dimension >= 2:
        return CirclePath(
            tuple(rng.uniform(-0.5, 0.5, dimension)),
            radius=float(rng.uniform(0.3, 1.0)),
            start_angle=float(rng.uniform(0, 2 * math.pi)),
            sweep=float(rng.uniform(0.5, math.pi)),
        )
    return PolynomialPath(tuple(tuple(row) for row in rng.uniform(-1, 1, (3, dimension))))


def random_field(rng: np.random.Generator, dimension: int) -> TangentField:
    return PolynomialField(tuple(tuple(row) for row in rng.uniform(-1, 1, (2, dimension))))


def random_fields(rng: np.random.Generator, dimension: int, count: int) -> list[TangentField]:
    return [random_field(rng, dimension) for _ in range(count)]


def sample_zigzag(
    zz: ZigzagAlgebra,
    rng: np.random.Generator,
    degree: int,
    max_columns: int,
    rows: tuple[int, ...] = (2, 4),
) -> ZigzagElement:
    """A nonzero normalized zigzag of the given degree with at most ``max_columns`` columns.

    Raises:
        InvalidElementError: If no such zigzag turns up in a bounded number of draws.
    """
    for _ in range(2000):
        k = rows[int(rng.integers(0, len(rows)))]
        n = int(rng.integers(0, max_columns + 1))
        raw = zz.sample_monomial(rng, k, n)
        if zz.degree(raw) != degree:
            continue
        x = zz.normalize(raw)
        if x:
            return x
    raise InvalidElementError(f"no nonzero zigzag of degree {degree} with n <= {max_columns}")


def sample_raw_zigzag(
    zz: ZigzagAlgebra, rng: np.random.Generator, degree: int, columns: range
) -> ZigzagMonomial:
    """A raw monomial of the given degree whose column count lies in ``columns``."""
    for _ in range(2000):
        k = (2, 4)[int(rng.integers(0, 2))]
        n = int(rng.choice(list(columns)))
        raw = zz.sample_monomial(rng, k, n)
        if zz.degree(raw) == degree and zz.normalize(raw):
            return raw
    raise InvalidElementError(f"no raw zigzag of degree {degree} with n in {list(columns)}")


def _exact(name: str, trials: int, trial: Callable[[int], str | None], **details: Any) -> CheckResult:
    """Run ``trial(i)`` until one returns a counterexample."""
    for i in range(trials):
        failure = trial(i)
        if failure is not None:
            LOGGER.info("%s failed on trial %d", name, i)
            return CheckResult.exact(name, False, i + 1, failure, **details)
    return CheckResult.exact(name, True, trials, **details)


# ---------------------------------------------------------------------------
# verify-zigzag
# ---------------------------------------------------------------------------


class _ZigzagTasks:
    def __init__(self, config: SuiteConfig) -> None:
        self.config = config
        self.section = config.zigzag
        self.trials = config.zigzag.trials
        self.faults = () if config.zigzag.inject_fault is None else (config.zigzag.inject_fault,)

    def carrier(self, instance: str) -> CurvedDGA:
        if instance == "matrix-form":
            return matrix_carrier(self.section.matrix)
        return tensor_carrier(self.section.tensor)

    def algebra(self, carrier: CurvedDGA) -> ZigzagAlgebra:
        return ZigzagAlgebra(
            carrier,
            faults=self.faults,
            sample_rows=self.section.rows,
            sample_columns=self.section.columns,
            entry_degree_cap=self.section.entry_degree_cap,
        )

    def tasks(self) -> list[Task]:
        out: list[Task] = []
        for instance in self.section.instances:
            out.extend(
                [
                    (f"{instance}.carrier_axioms", lambda rng, i=instance: self.carrier_axioms(i, rng)),
                    (f"{instance}.zigzag_axioms", lambda rng, i=instance: self.zigzag_axioms(i, rng)),
                    (f"{instance}.d_squared", lambda rng, i=instance: self.d_squared(i, rng)),
                    (f"{instance}.leibniz", lambda rng, i=instance: self.leibniz(i, rng)),
                    (f"{instance}.associativity", lambda rng, i=instance: self.associativity(i, rng)),
                    (f"{instance}.unit", lambda rng, i=instance: self.unit(i, rng)),
                    (f"{instance}.homotopy", lambda rng, i=instance: self.homotopy(i, rng)),
                    (f"{instance}.confluence", lambda rng, i=instance: self.confluence(i, rng)),
                    (f"{instance}.quotient", lambda rng, i=instance: self.quotient(i, rng)),
                    (f"{instance}.functoriality", lambda rng, i=instance: self.functoriality(i, rng)),
                ]
            )
        if "matrix-form" in self.section.instances:
            out.append(("scalar-forms.bar", self.bar))
            out.append(("scalar-forms.collapse", self.collapse))
        return out

    def carrier_axioms(self, instance: str, rng: np.random.Generator) -> TaskOutcome:
        carrier = self.carrier(instance)
        seed = int(rng.integers(0, 2**31))
        report = check_curved_dga_axioms(carrier, trials=self.trials["axioms"], seed=seed)
        return TaskOutcome([CheckResult.from_axioms(f"{instance}.carrier_axioms", report)])

    def zigzag_axioms(self, instance: str, rng: np.random.Generator) -> TaskOutcome:
        zz = self.algebra(self.carrier(instance))
        seed = int(rng.integers(0, 2**31))
        report = check_curved_dga_axioms(zz, trials=self.trials["d_squared"], seed=seed)
        return TaskOutcome([CheckResult.from_axioms(f"{instance}.zigzag_axioms", report)])

    def d_squared(self, instance: str, rng: np.random.Generator) -> TaskOutcome:
        """``D_z² x = [R_z, x]`` on every (k, n) cell."""
        zz = self.algebra(self.carrier(instance))
        cells = [(k, n) for k in self.section.rows for n in self.section.columns]
        curvature = zz.curvature

        def trial(i: int) -> str | None:
            k, n = cells[i % len(cells)]
            x = zz.normalize(zz.sample_monomial(rng, k, n))
            if zz.D_z(zz.D_z(x)) != zz.commutator(curvature, x):
                return f"(k={k}, n={n}) x={zz.describe(x)}"
            return None

        return TaskOutcome([_exact(f"{instance}.d_squared", self.trials["d_squared"] * len(cells), trial, cells=len(cells))])

    def leibniz(self, instance: str, rng: np.random.Generator) -> TaskOutcome:
        zz = self.algebra(self.carrier(instance))

        def trial(_: int) -> str | None:
            x, y = zz.sample_element(rng), zz.sample_element(rng)
            sign = -1 if zz.degree_of(x) % 2 else 1
            lhs = zz.D_z(zz.shuffle(x, y))
            rhs = vec_add(zz.shuffle(zz.D_z(x), y), zz.shuffle(x, zz.D_z(y)), sign)
            if dict(lhs) != rhs:
                return f"x={zz.describe(x)}; y={zz.describe(y)}"
            return None

        return TaskOutcome([_exact(f"{instance}.leibniz", self.trials["leibniz"], trial)])

    def associativity(self, instance: str, rng: np.random.Generator) -> TaskOutcome:
        zz = self.algebra(self.carrier(instance))

        def trial(_: int) -> str | None:
            x, y, z = (zz.sample_element(rng) for _ in range(3))
            if zz.shuffle(zz.shuffle(x, y), z) != zz.shuffle(x, zz.shuffle(y, z)):
                return f"x={zz.describe(x)}; y={zz.describe(y)}; z={zz.describe(z)}"
            return None

        return TaskOutcome([_exact(f"{instance}.associativity", self.trials["associativity"], trial)])

    def unit(self, instance: str, rng: np.random.Generator) -> TaskOutcome:
        zz = self.algebra(self.carrier(instance))
        one = zz.unit

        def trial(_: int) -> str | None:
            x = zz.sample_element(rng)
            if zz.shuffle(one, x) != x or zz.shuffle(x, one) != x:
                return f"x={zz.describe(x)}"
            return None

        return TaskOutcome([_exact(f"{instance}.unit", self.trials["unit"], trial)])

    def homotopy(self, instance: str, rng: np.random.Generator) -> TaskOutcome:
        """``α∘η = id`` on the carrier and ``id - η∘α = D_z s + s D_z`` on ZZ."""
        carrier = self.carrier(instance)
        zz = self.algebra(carrier)

        def retraction(_: int) -> str | None:
            a = carrier.sample_element(rng)
            if zz.alpha(zz.eta(a)) != a:
                return f"a={carrier.describe(a)}"
            return None

        def identity(_: int) -> str | None:
            x = zz.sample_element(rng)
            lhs = vec_sub(x, zz.eta(zz.alpha(x)))
            rhs = vec_add(zz.D_z(zz.s_homotopy(x)), zz.s_homotopy(zz.D_z(x)))
            if lhs != rhs:
                return f"x={zz.describe(x)}"
            return None

        trials = self.trials["homotopy"]
        return TaskOutcome(
            [
                _exact(f"{instance}.alpha_eta", trials, retraction),
                _exact(f"{instance}.homotopy", trials, identity, global_sign=1),
            ]
        )

    def confluence(self, instance: str, rng: np.random.Generator) -> TaskOutcome:
        """Random unit insertions, slides and splits leave the normal form unchanged."""
        zz = self.algebra(self.carrier(instance))
        cells = [(k, n) for k in self.section.rows for n in self.section.columns]

        def trial(i: int) -> str | None:
            k, n = cells[i % len(cells)]
            raw = zz.sample_monomial(rng, k, n)
            moved = raw
            moves = []
            for _ in range(int(rng.integers(1, 5))):
                kind = int(rng.integers(0, 3))
                if kind == 0:
                    j = int(rng.integers(0, moved.k + 1))
                    moved = zz.insert_units(moved, j)
                    moves.append(f"ins{j}")
                    continue
                slot = int(rng.integers(0, moved.slots))
                candidate = zz.slide_entry(moved, slot) if kind == 1 else zz.split_entry(moved, slot, rng)
                if candidate is not None:
                    moved = candidate
                    moves.append(f"{'slide' if kind == 1 else 'split'}{slot}")
            if zz.normalize(moved) != zz.normalize(raw):
                return f"x={zz.describe_key(raw)}; moves={','.join(moves)}"
            return None

        return TaskOutcome([_exact(f"{instance}.confluence", self.trials["confluence"], trial)])

    def quotient(self, instance: str, rng: np.random.Generator) -> TaskOutcome:
        """The differential is well defined on classes: ``D_z(raw) = D_z(normalize(raw))``."""
        zz = self.algebra(self.carrier(instance))

        def trial(_: int) -> str | None:
            k = self.section.rows[int(rng.integers(0, len(self.section.rows)))]
            n = self.section.columns[int(rng.integers(0, len(self.section.columns)))]
            raw = zz.sample_monomial(rng, k, n)
            if zz.D_z(raw) != zz.D_z(zz.normalize(raw)):
                return f"x={zz.describe_key(raw)}"
            return None

        return TaskOutcome([_exact(f"{instance}.quotient", self.trials["quotient"], trial)])

    def _witness(self, instance: str) -> DGAMorphismWitness:
        if instance == "matrix-form":
            m = self.section.matrix
            return scalar_inclusion_witness(m.dimension, m.rank)
        carrier = tensor_carrier(self.section.tensor)
        return identity_witness(carrier, [w for d in range(3) for w in carrier.window_basis(d)])

    def functoriality(self, instance: str, rng: np.random.Generator) -> TaskOutcome:
        """ZZ(f) commutes with D_z and ⊙; an unverified map is refused."""
        witness = self._witness(instance)
        source, target = self.algebra(witness.source), self.algebra(witness.target)

        def trial(_: int) -> str | None:
            x, y = source.sample_element(rng), source.sample_element(rng)
            fx = zz_map(witness, x, target)
            if zz_map(witness, source.D_z(x), target) != target.D_z(fx):
                return f"differential: x={source.describe(x)}"
            if zz_map(witness, source.shuffle(x, y), target) != target.shuffle(fx, zz_map(witness, y, target)):
                return f"product: x={source.describe(x)}; y={source.describe(y)}"
            return None

        result = _exact(f"{instance}.functoriality", self.trials["functoriality"], trial, witness=witness.name)
        perturbation = perturbation_witness()
        try:
            zz_map(perturbation, ZigzagAlgebra(perturbation.source).unit)
            refused = False
        except UnsupportedCarrierError:
            refused = True
        rejection = CheckResult.exact(
            f"{instance}.rejects_non_morphism",
            refused,
            counterexample=f"{perturbation.name} was accepted by zz_map",
        )
        return TaskOutcome([result, rejection])

    def bar(self, rng: np.random.Generator) -> TaskOutcome:
        """Two-sided bar complex of scalar forms: ``D² = 0`` and Leibniz over the shuffle."""
        carrier = scalar_carrier(self.section.matrix.dimension)
        cap = self.section.entry_degree_cap
        n_max = max(self.section.columns)

        def draw():
            return sample_bar_monomial(carrier, rng, int(rng.integers(0, n_max + 1)), cap)

        def square(_: int) -> str | None:
            x = draw()
            if bar_differential(carrier, bar_differential(carrier, x)):
                return f"x={x.entries}"
            return None

        def leibniz(_: int) -> str | None:
            x, y = draw(), draw()
            sign = -1 if bar_degree(carrier, x) % 2 else 1
            lhs = bar_differential(carrier, bar_shuffle(carrier, x, y))
            rhs = vec_add(
                bar_shuffle(carrier, bar_differential(carrier, x), y),
                bar_shuffle(carrier, x, bar_differential(carrier, y)),
                sign,
            )
            if lhs != rhs:
                return f"x={x.entries}; y={y.entries}"
            return None

        trials = self.trials["bar"]
        return TaskOutcome([_exact("scalar-forms.bar_d_squared", trials, square), _exact("scalar-forms.bar_leibniz", trials, leibniz)])

    def collapse(self, rng: np.random.Generator) -> TaskOutcome:
        """Col is a chain map and an algebra map."""
        carrier = scalar_carrier(self.section.matrix.dimension)
        zz = self.algebra(carrier)

        def chain(_: int) -> str | None:
            x = zz.sample_element(rng)
            if col_collapse(carrier, zz.D_z(x)) != bar_differential(carrier, col_collapse(carrier, x)):
                return f"x={zz.describe(x)}"
            return None

        def product(_: int) -> str | None:
            x, y = zz.sample_element(rng), zz.sample_element(rng)
            lhs = col_collapse(carrier, zz.shuffle(x, y))
            rhs = bar_shuffle(carrier, col_collapse(carrier, x), col_collapse(carrier, y))
            if lhs != rhs:
                return f"x={zz.describe(x)}; y={zz.describe(y)}"
            return None

        trials = self.trials["collapse"]
        return TaskOutcome(
            [_exact("scalar-forms.collapse_chain_map", trials, chain), _exact("scalar-forms.collapse_algebra_map", trials, product)]
        )


# ---------------------------------------------------------------------------
# verify-pathspace
# ---------------------------------------------------------------------------


class _PathspaceTasks:
    def __init__(self, config: SuiteConfig) -> None:
        self.config = config
        self.section = config.pathspace
        self.matrix = config.zigzag.matrix
        self.fixtures = config.pathspace.fixtures
        self.tolerances = config.pathspace.tolerances

    def evaluator(self, carrier: MatrixFormCDGA) -> ChenEvaluator:
        zz = ZigzagAlgebra(carrier, sample_rows=(2, 4), entry_degree_cap=self.config.zigzag.entry_degree_cap)
        return ChenEvaluator(carrier, self.section.step, self.section.order, self.section.fd_step, zz)

    def tasks(self) -> list[Task]:
        names = [
            "transport",
            "transport_derivative",
            "stokes",
            "ev0_triangle",
            "covariant_derivative",
            "alternation",
            "quotient_invariance",
            "boundary_term",
            "chain_map",
            "algebra_map",
            "triangle",
            "shrink_homotopy",
            "convergence_gate",
        ]
        return [(name, getattr(self, name)) for name in names]

    def _numeric(self, name: str, checks: list[NumericCheck], **details: Any) -> TaskOutcome:
        return TaskOutcome([CheckResult.from_numeric(name, checks, self.tolerances[name], **details)])

    def transport(self, rng: np.random.Generator) -> TaskOutcome:
        """Liouville determinant, composition and, for constant connections, the expm closed form."""
        carrier = matrix_carrier(self.matrix)
        conn = ConnectionData.from_cdga(carrier)
        step, tol = self.section.step, self.tolerances["transport"]
        checks = []
        for _ in range(self.fixtures["transport"]):
            path = random_path(rng, carrier.dimension)
            t1, t2 = sorted(rng.uniform(0, 1, 2))
            gaps = {
                "liouville": liouville_gap(conn, path, 0.0, 1.0, step),
                "composition": composition_gap(conn, path, float(t1), float(t2), step),
            }
            if carrier.is_constant_connection:
                gaps["expm"] = constant_line_transport_gap(
                    conn, rng.uniform(-1, 1, carrier.dimension), rng.uniform(-1, 1, carrier.dimension), step
                )
            checks.append(NumericCheck("transport", max(gaps.values()), tol, details=gaps))
        return self._numeric("transport", checks)

    def transport_derivative(self, rng: np.random.Generator) -> TaskOutcome:
        """Curvature-integral formula for the variation of ``P_{a→b}`` against central differences."""
        carrier = matrix_carrier(self.matrix)
        conn = ConnectionData.from_cdga(carrier)
        checks = []
        for i in range(self.fixtures["transport_derivative"]):
            path = random_path(rng, carrier.dimension)
            fld = random_field(rng, carrier.dimension)
            a, b = (0.0, 1.0) if i % 2 == 0 else (float(rng.uniform(0, 0.4)), float(rng.uniform(0.6, 1.0)))
            formula = transport_derivative(conn, path, fld, a, b, step=self.section.step)
            fd = transport_derivative_fd(conn, path, fld, a, b, self.section.fd_step, self.section.step)
            checks.append(NumericCheck("transport_derivative", relative_gap(formula, fd), self.tolerances["transport_derivative"]))
        return self._numeric("transport_derivative", checks)

    def stokes(self, rng: np.random.Generator) -> TaskOutcome:
        carrier = matrix_carrier(self.matrix)
        checks = []
        for _ in range(self.fixtures["stokes"]):
            degree = int(rng.integers(0, carrier.dimension + 2))
            omega = sample_product_form(carrier, rng, degree)
            checks.append(
                fiber_integration_stokes_check(
                    carrier, omega, self.tolerances["stokes"], seed=int(rng.integers(0, 2**31))
                )
            )
        exact = all(c.details.get("exact") for c in checks)
        return self._numeric("stokes", checks, exact=exact)

    def ev0_triangle(self, rng: np.random.Generator) -> TaskOutcome:
        """``It(η(ω)) = ev₀^*ω``."""
        carrier = matrix_carrier(self.matrix)
        ev = self.evaluator(carrier)
        checks = []
        for _ in range(self.fixtures["ev0_triangle"]):
            q = int(rng.integers(0, min(self.section.max_fields, carrier.dimension) + 1))
            form = carrier.sample_element(rng, q)
            path = random_path(rng, carrier.dimension)
            checks.append(ev0_triangle_check(ev, form, path, random_fields(rng, carrier.dimension, q), self.tolerances["ev0_triangle"]))
        return self._numeric("ev0_triangle", checks)

    def covariant_derivative(self, rng: np.random.Generator) -> TaskOutcome:
        """The path-space covariant derivative of ``ev₀^*ω`` is ``ev₀^*(∇ω)``."""
        carrier = matrix_carrier(self.matrix)
        ev = self.evaluator(carrier)
        checks = []
        for _ in range(self.fixtures["covariant_derivative"]):
            q = int(rng.integers(0, max(self.section.max_fields, 1)))
            form = carrier.sample_element(rng, q)
            path = random_path(rng, carrier.dimension)
            fields = random_fields(rng, carrier.dimension, q + 1)
            left = covariant_exterior_derivative(
                ev0_pullback(carrier, form), path, fields, ev.connection, ev.h, ev.step
            )
            image = carrier.nabla(form)
            right = ev0_pullback(carrier, image)(path, fields) if image else np.zeros_like(left)
            checks.append(NumericCheck("covariant_derivative", relative_gap(left, right), self.tolerances["covariant_derivative"]))
        return self._numeric("covariant_derivative", checks)

    def alternation(self, rng: np.random.Generator) -> TaskOutcome:
        carrier = matrix_carrier(self.matrix)
        ev = self.evaluator(carrier)
        checks = []
        if self.section.max_fields >= 2:
            for _ in range(self.fixtures["alternation"]):
                x = sample_zigzag(ev.zigzag, rng, 2, self.section.max_columns)
                path = random_path(rng, carrier.dimension)
                checks.append(alternation_check(ev, x, path, random_fields(rng, carrier.dimension, 2), self.tolerances["alternation"]))
        return self._numeric("alternation", checks)

    def quotient_invariance(self, rng: np.random.Generator) -> TaskOutcome:
        """It of a raw monomial equals It of its normal form."""
        carrier = matrix_carrier(self.matrix)
        ev = self.evaluator(carrier)
        checks = []
        for _ in range(self.fixtures["quotient_invariance"]):
            q = int(rng.integers(0, self.section.max_fields + 1))
            raw = sample_raw_zigzag(ev.zigzag, rng, q, range(0, self.section.max_columns + 1))
            path = random_path(rng, carrier.dimension)
            checks.append(quotient_invariance_check(ev, raw, path, random_fields(rng, carrier.dimension, q), self.tolerances["quotient_invariance"]))
        return self._numeric("quotient_invariance", checks)

    def boundary_term(self, rng: np.random.Generator) -> TaskOutcome:
        """``It(b_z m)`` against the signed face integrals over the boundary of the simplex."""
        carrier = matrix_carrier(self.matrix)
        ev = self.evaluator(carrier)
        checks = []
        columns = range(1, max(self.section.max_columns, 1) + 1)
        for _ in range(self.fixtures["boundary_term"]):
            q = int(rng.integers(0, self.section.max_fields))
            m = sample_raw_zigzag(ev.zigzag, rng, q, columns)
            path = random_path(rng, carrier.dimension)
            checks.append(boundary_term_check(ev, m, path, random_fields(rng, carrier.dimension, q + 1), self.tolerances["boundary_term"]))
        return self._numeric("boundary_term", checks)

    def chain_map(self, rng: np.random.Generator) -> TaskOutcome:
        """``∇̃ It(x) = It(D_z x)``.

        The first fixture holds a single form in interior column 1, where the
        inserted curvature is blocked from sliding between rows, so its c_z
        term is nonzero on a curved carrier. On ``η(ω)`` the two insertions cancel.
        """
        carrier = matrix_carrier(self.matrix)
        ev = self.evaluator(carrier)
        zz = ev.zigzag
        max_columns = min(self.section.max_columns, 2)
        unit = carrier.unit_key
        checks = []
        active = 0
        for i in range(self.fixtures["chain_map"]):
            q = int(rng.integers(1, min(self.section.max_fields, carrier.dimension) + 1))
            if i == 0:
                key = carrier.sample_key(rng, q)
                x = zz.normalize(ZigzagMonomial(2, 1, (unit, key, unit, unit, unit)))
            else:
                x = sample_zigzag(zz, rng, q - 1, max_columns)
            active += bool(zz.c_z(x))
            path = random_path(rng, carrier.dimension)
            checks.append(check_chain_map(ev, x, path, random_fields(rng, carrier.dimension, q), self.tolerances["chain_map"]))
        result = CheckResult.from_numeric("chain_map", checks, self.tolerances["chain_map"], c_z_active=active)
        if checks and not carrier.is_flat and active == 0:
            result.status = "fail"
            result.counterexample = "no fixture exercised the c_z term"
        return TaskOutcome([result])

    def algebra_map(self, rng: np.random.Generator) -> TaskOutcome:
        """``It(x ⊙ y) = It(x) ∧ It(y)``, alternating between scalar flat and curved carriers."""
        carriers = [scalar_carrier(self.matrix.dimension), matrix_carrier(self.matrix)]
        evaluators = [self.evaluator(c) for c in carriers]
        checks = []
        for i in range(self.fixtures["algebra_map"]):
            ev = evaluators[i % 2]
            q = int(rng.integers(0, self.section.max_fields + 1))
            p = int(rng.integers(0, q + 1))
            x = sample_zigzag(ev.zigzag, rng, p, 1)
            y = sample_zigzag(ev.zigzag, rng, q - p, 1)
            path = random_path(rng, ev.carrier.dimension)
            checks.append(check_algebra_map(ev, x, y, path, random_fields(rng, ev.carrier.dimension, q), self.tolerances["algebra_map"]))
        return self._numeric("algebra_map", checks)

    def triangle(self, rng: np.random.Generator) -> TaskOutcome:
        """It of a scalar zigzag against the classical Chen integral of its collapse."""
        carrier = scalar_carrier(self.matrix.dimension)
        ev = self.evaluator(carrier)
        checks = []
        for _ in range(self.fixtures["triangle"]):
            q = int(rng.integers(0, self.section.max_fields + 1))
            x = sample_zigzag(ev.zigzag, rng, q, self.section.max_columns)
            path = random_path(rng, carrier.dimension)
            checks.append(triangle_check(ev, x, path, random_fields(rng, carrier.dimension, q), self.tolerances["triangle"]))
        return self._numeric("triangle", checks)

    def shrink_homotopy(self, rng: np.random.Generator) -> TaskOutcome:
        carrier = matrix_carrier(self.matrix)
        ev = self.evaluator(carrier)
        checks = []
        for _ in range(self.fixtures["shrink_homotopy"]):
            q = int(rng.integers(1, max(self.section.max_fields, 1) + 1))
            x = sample_zigzag(ev.zigzag, rng, q, min(self.section.max_columns, 1), rows=(2,))
            path = random_path(rng, carrier.dimension)
            checks.append(
                shrink_homotopy_check(ev, x, path, random_fields(rng, carrier.dimension, q), tolerance=self.tolerances["shrink_homotopy"])
            )
        return self._numeric("shrink_homotopy", checks)

    def convergence_gate(self, rng: np.random.Generator) -> TaskOutcome:
        """Refining the ODE step and the quadrature order moves It by less than the gate,
        and the chain-map and algebra-map errors do not grow under the same refinement."""
        carrier = matrix_carrier(self.matrix)
        ev = self.evaluator(carrier)
        gate = self.tolerances["convergence_gate"]
        moves, chain, product = [], [], []
        for _ in range(self.fixtures["convergence_gate"]):
            q = int(rng.integers(0, self.section.max_fields + 1))
            x = sample_zigzag(ev.zigzag, rng, q, self.section.max_columns)
            path = random_path(rng, carrier.dimension)
            moves.append(convergence_gate(ev, x, path, random_fields(rng, carrier.dimension, q), gate))

            q = int(rng.integers(1, min(self.section.max_fields, carrier.dimension) + 1))
            x = sample_zigzag(ev.zigzag, rng, q - 1, min(self.section.max_columns, 1))
            path = random_path(rng, carrier.dimension)
            fields = random_fields(rng, carrier.dimension, q)
            chain.append(
                refinement_check("chain_map", lambda e, x=x, p=path, f=fields: check_chain_map(e, x, p, f, gate), ev, gate)
            )

            q = int(rng.integers(0, self.section.max_fields + 1))
            p = int(rng.integers(0, q + 1))
            x = sample_zigzag(ev.zigzag, rng, p, 1)
            y = sample_zigzag(ev.zigzag, rng, q - p, 1)
            path = random_path(rng, carrier.dimension)
            fields = random_fields(rng, carrier.dimension, q)
            product.append(
                refinement_check(
                    "algebra_map", lambda e, x=x, y=y, p=path, f=fields: check_algebra_map(e, x, y, p, f, gate), ev, gate
                )
            )

        def fold(name: str, checks: list[NumericCheck]) -> CheckResult:
            return CheckResult.from_numeric(name, checks, max((c.tolerance for c in checks), default=gate), step=ev.step, order=ev.order)

        return TaskOutcome(
            [
                fold("convergence_gate", moves),
                fold("chain_map_refinement", chain),
                fold("algebra_map_refinement", product),
            ]
        )


# ---------------------------------------------------------------------------
# cohomology
# ---------------------------------------------------------------------------


class _CohomologyTasks:
    def __init__(self, config: SuiteConfig) -> None:
        self.section = config.cohomology

    def tasks(self) -> list[Task]:
        return [("tensor", self.tensor), ("matrix", self.matrix), ("scalar", self.scalar)]

    def _agreement(self, name: str, inst: CurvedDGA, window: TruncationWindow, curved: dict[int, int]) -> tuple[CheckResult, dict[str, Any]]:
        maximal = maximal_subdga_cohomology(inst, window, self.section.representatives)
        ok = maximal.dims() == curved
        result = CheckResult.exact(
            f"{name}.maximal_subdga_agreement",
            ok,
            len(curved),
            counterexample=f"curved {curved} vs maximal sub-dga {maximal.dims()}",
        )
        return result, maximal.to_dict()

    def tensor(self, rng: np.random.Generator) -> TaskOutcome:
        """``H⁰ = 1`` and ``dim H^k(T(V), [v, −], v ⊗ v) < dv^k = dim H^k(T(V), 0, 0)``."""
        section = self.section.tensor
        inst = tensor_carrier(section)
        window = TruncationWindow(0, self.section.tensor_max_degree, None)
        report = curved_cohomology(inst, window, self.section.representatives)
        dims = report.dims()
        tables = {"tensor": report.to_dict()}
        if inst.is_flat:
            flat_dims = dims
        else:
            flat = tensor_carrier(TensorSection(section.dv, None))
            flat_report = curved_cohomology(flat, window, self.section.representatives)
            flat_dims = flat_report.dims()
            tables["tensor.flat"] = flat_report.to_dict()
        degrees = range(window.min_degree, window.max_degree + 1)
        off = [k for k in degrees if flat_dims[k] != section.dv**k]
        checks = [
            CheckResult.exact("tensor.h0", dims.get(0) == 1, counterexample=f"dim H^0 = {dims.get(0)}"),
            CheckResult.exact(
                "tensor.flat_dims",
                not off,
                len(flat_dims),
                counterexample=f"flat dim H^k != {section.dv}^k at k = {off}: {flat_dims}",
            ),
        ]
        if not inst.is_flat:
            bad = [k for k in range(1, window.max_degree + 1) if not dims[k] < flat_dims[k]]
            checks.append(
                CheckResult.exact(
                    "tensor.strict_inequality",
                    not bad,
                    window.max_degree,
                    counterexample=f"curved {dims} vs flat {flat_dims} at k = {bad}",
                )
            )
        agreement, maximal = self._agreement("tensor", inst, window, dims)
        checks.append(agreement)
        tables["tensor.maximal_subdga"] = maximal
        return TaskOutcome(checks, tables)

    def _window(self, total_degree: bool = False) -> TruncationWindow:
        w = self.section.window
        return TruncationWindow(w.min_degree, w.max_degree, w.cap, total_degree)

    def matrix(self, rng: np.random.Generator) -> TaskOutcome:
        """Curvature value and a curved-closed, non-exact 1-form for the example connection."""
        inst = matrix_carrier(self.section.matrix)
        window = self._window()
        report = curved_cohomology(inst, window, self.section.representatives)
        dims = report.dims()
        checks = []
        if self.section.matrix.connection == "example":
            expected = inst.expand(FormElement.constant([[2, 0], [0, -2]], (0, 1), 2))
            checks.append(
                CheckResult.exact(
                    "matrix.curvature_value",
                    inst.curvature == expected,
                    counterexample=f"R = {inst.describe(inst.curvature)}",
                )
            )
            omega = example_curved_closed_form()
            closed = is_curved_closed(inst, omega, window) is not None
            exact = is_curved_exact(inst, omega, window)
            ok = closed and not exact and window.min_degree <= 1 <= window.max_degree and dims[1] >= 1
            checks.append(
                CheckResult.exact(
                    "matrix.nonzero_h1",
                    ok,
                    counterexample=f"closed={closed}, exact={exact}, dims={dims}",
                    closed=closed,
                    exact=exact,
                )
            )
        agreement, maximal = self._agreement("matrix", inst, window, dims)
        checks.append(agreement)
        return TaskOutcome(checks, {"matrix": report.to_dict(), "matrix.maximal_subdga": maximal})

    def scalar(self, rng: np.random.Generator) -> TaskOutcome:
        """Polynomial Poincaré lemma for flat scalar forms on ℝ^d."""
        inst = scalar_carrier(self.section.matrix.dimension)
        window = self._window(total_degree=True)
        report = curved_cohomology(inst, window, self.section.representatives)
        dims = report.dims()
        expected = {p: (1 if p == 0 else 0) for p in window.degrees()}
        checks = [CheckResult.exact("scalar.poincare", dims == expected, len(dims), counterexample=f"dims={dims}")]
        agreement, _ = self._agreement("scalar", inst, window, dims)
        checks.append(agreement)
        return TaskOutcome(checks, {"scalar": report.to_dict()})


# ---------------------------------------------------------------------------
# Runner
# ---------------------------------------------------------------------------


def task_rng(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(name.encode())])


class SuiteRunner:
    """Runs a suite's tasks on a thread pool and assembles the report in declaration order."""

    def __init__(self, config: SuiteConfig) -> None:
        self.config = config

    def tasks(self, suite: str) -> list[Task]:
        if suite == "verify-zigzag":
            return _ZigzagTasks(self.config).tasks()
        if suite == "verify-pathspace":
            return _PathspaceTasks(self.config).tasks()
        if suite == "cohomology":
            return _CohomologyTasks(self.config).tasks()
        raise ValueError(f"unknown suite {suite!r}; expected one of {SUITES}")

    def _run_task(self, task: Task) -> TaskOutcome:
        name, fn = task
        LOGGER.info("starting %s", name)
        try:
            outcome = fn(task_rng(self.config.seed, name))
        except CurvedZigzagError as e:
            LOGGER.error("%s raised %s: %s", name, type(e).__name__, e)
            outcome = TaskOutcome(
                [CheckResult.exact(name, False, 0, counterexample=f"{type(e).__name__}: {e}", error=type(e).__name__)]
            )
        LOGGER.info("finished %s: %s", name, "pass" if all(c.passed for c in outcome.checks) else "FAIL")
        return outcome

    def run(self, suite: str) -> Report:
        tasks = self.tasks(suite)
        LOGGER.info("running %s: %d tasks on %d workers", suite, len(tasks), self.config.workers)
        if self.config.workers == 1:
            outcomes = [self._run_task(t) for t in tasks]
        else:
            with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
                outcomes = list(pool.map(self._run_task, tasks))
        report = Report(suite, self.config.seed)
        for outcome in outcomes:
            report.checks.extend(outcome.checks)
            report.tables.update(outcome.tables)
        return report


def run_suite(suite: str, config: SuiteConfig) -> Report:
    return SuiteRunner(config).run(suite)
