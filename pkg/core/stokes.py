"""Fiber integration along the trivial interval bundle ``[0,1] × ℝ^d -> ℝ^d``.

Forms on the total space live on ℝ^(d+1) with coordinate 0 as the fiber
variable t. Fiber integration keeps the terms whose first generator is dt and
integrates their coefficients over t exactly; the fiber-first convention
``∫_F dt ∧ β = (∫_0^1 β dt)`` fixes all signs. For any connection A on the
base and its pullback on the total space,

    -∇ ∫_F ω = ∫_F (p^*∇) ω - ∫_{∂F} ω,    ∫_{∂F} ω = ω|_{t=1} - ω|_{t=0}.
"""

from __future__ import annotations

import logging
from fractions import Fraction

import numpy as np

from core.chen import NumericCheck
from core.curved_dga import MatrixFormCDGA, make_matrix_form_cdga
from core.errors import DimensionMismatchError
from core.graded import FormElement, exterior_derivative, graded_commutator

LOGGER = logging.getLogger(__name__)


def covariant_form_derivative(connection: FormElement, omega: FormElement) -> FormElement:
    """``dω + [A, ω]``."""
    return exterior_derivative(omega) + graded_commutator(connection, omega)


def fiber_integrate(omega: FormElement) -> FormElement:
    """``∫_F ω`` as a form on the base ℝ^d."""
    kept = {}
    for subset, coefficient in omega.terms.items():
        if not subset or subset[0] != 0:
            continue
        kept[subset[1:]] = coefficient.map(lambda p: p.integrate_unit_interval(0))
    return FormElement(omega.dimension, omega.rank, kept).drop_leading_coordinate()


def boundary_integral(omega: FormElement) -> FormElement:
    """``∫_{∂F} ω = ω|_{t=1} - ω|_{t=0}`` on dt-free terms."""
    return (omega.restrict(0, 1) - omega.restrict(0, 0)).drop_leading_coordinate()


def product_instance(inst: MatrixFormCDGA) -> MatrixFormCDGA:
    """The carrier on ``[0,1] × ℝ^d`` with the pulled-back connection."""
    return make_matrix_form_cdga(inst.dimension + 1, inst.rank, inst.connection.lift(), f"{inst.name}×I")


def stokes_defect(inst: MatrixFormCDGA, omega: FormElement) -> FormElement:
    """``-∇∫_F ω - ∫_F (p^*∇)ω + ∫_{∂F} ω``, which vanishes identically.

    Raises:
        DimensionMismatchError: If ω does not live on ``[0,1] × ℝ^d`` with the carrier's rank.
    """
    if (omega.dimension, omega.rank) != (inst.dimension + 1, inst.rank):
        raise DimensionMismatchError(
            f"ω must live on [0,1]×ℝ^{inst.dimension} with rank {inst.rank}, "
            f"got d={omega.dimension}, r={omega.rank}"
        )
    integrated = fiber_integrate(omega)
    left = -covariant_form_derivative(inst.connection, integrated)
    pulled = covariant_form_derivative(inst.connection.lift(), omega)
    right = fiber_integrate(pulled) - boundary_integral(omega)
    return left - right


def fiber_integration_stokes_check(
    inst: MatrixFormCDGA,
    omega: FormElement,
    tolerance: float = 1e-8,
    samples: int = 16,
    seed: int = 0,
) -> NumericCheck:
    """Evaluate the Stokes defect exactly and at sample points of the base."""
    defect = stokes_defect(inst, omega)
    exact_zero = defect.is_zero()
    points = np.random.default_rng(seed).uniform(-1.0, 1.0, size=(samples, inst.dimension))
    values = defect.evaluate_array(points)
    error = max((float(np.max(np.abs(v))) for v in values.values()), default=0.0)
    LOGGER.debug("stokes defect on %d-term form: exact zero %s, sampled %.3e", len(omega.terms), exact_zero, error)
    return NumericCheck(
        "fiber_stokes",
        error,
        tolerance,
        details={"exact": exact_zero, "terms": len(omega.terms)},
    )


def sample_product_form(inst: MatrixFormCDGA, rng: np.random.Generator, degree: int, terms: int = 3) -> FormElement:
    """A random form of the given degree on ``[0,1] × ℝ^d``."""
    lifted = product_instance(inst)
    vec = lifted.sample_element(rng, degree, terms)
    return lifted.realize({k: Fraction(c) for k, c in vec.items()})
