"""Numerical laboratory for bubble blow-up constructions of the Yamabe equation.

The package checks, by exact arithmetic and seeded Monte Carlo, the
finite-dimensional reduction behind metrics of the form ``g = exp(h)``
with ``h`` built from algebraic Weyl forms: the critical scale of the
reduced energy, the dimension threshold at which it becomes a strict
local minimum, the supporting sphere and radial integrals, and the
scaling of the curvature error terms.
"""

__version__ = "0.1.0"

from .bubbles import BubbleParams, OmegaDomain, bubble, bubble_mass, omega_contains, phi, phi_norm
from .calculus import (
    CriticalPointReport,
    F0,
    certify_minimum,
    dimension_scan,
    discriminant,
    eps_star,
    hessian_xi_closed,
    hessian_xi_integral,
    radial_integral,
    reduced_bracket,
    sphere_moment,
)
from .curvature import (
    GluedFieldParams,
    MetricJet,
    PatchParams,
    error_fields,
    error_norms,
    glued_field,
    patch_field,
    quadratic_energy,
    scalar_curvature_approx,
    scalar_curvature_exact,
    sym_exp_jet,
)
from .quadrature import QuadratureEstimate, RegionSpec, ball_mc, product_integrate, sphere_mc
from .weyl import WeylForm, project_to_weyl, random_weyl

__all__ = [
    "BubbleParams", "OmegaDomain", "bubble", "bubble_mass", "omega_contains", "phi", "phi_norm",
    "CriticalPointReport", "F0", "certify_minimum", "dimension_scan", "discriminant", "eps_star",
    "hessian_xi_closed", "hessian_xi_integral", "radial_integral", "reduced_bracket", "sphere_moment",
    "GluedFieldParams", "MetricJet", "PatchParams", "error_fields", "error_norms", "glued_field",
    "patch_field", "quadratic_energy", "scalar_curvature_approx", "scalar_curvature_exact",
    "sym_exp_jet", "QuadratureEstimate", "RegionSpec", "ball_mc", "product_integrate", "sphere_mc",
    "WeylForm", "project_to_weyl", "random_weyl",
]
