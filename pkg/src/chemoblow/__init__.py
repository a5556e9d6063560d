"""Radial finite-volume laboratory for flux-limited chemotaxis blow-up.

Simulates the parabolic-elliptic cell-density/attractant system on a ball up
to numerical blow-up, validates parameter and initial-data admissibility,
and computes explicit a priori lower bounds on the blow-up time from the
associated differential inequality for the L^p energy.
"""

from .grid import RadialGrid, RadialField, integrate, lp_norm, cumulative_mass
from .elliptic import ChemoGradient, solve_gradient, residual
from .pde import FluxLimiter, StepController, ChemoState, rhs, step, run, SimResult
from .admissibility import ModelParams, AdmissibilityReport, check_alpha, check_concentration, make_bump
from .bounds import (BoundConstants, PsiTrace, build_constants, lower_bound_quadrature,
                     lower_bound_closed_form, comparison_ode, check_psi_inequality,
                     estimate_gn_constant)

__all__ = [
    "RadialGrid", "RadialField", "integrate", "lp_norm", "cumulative_mass",
    "ChemoGradient", "solve_gradient", "residual",
    "FluxLimiter", "StepController", "ChemoState", "rhs", "step", "run", "SimResult",
    "ModelParams", "AdmissibilityReport", "check_alpha", "check_concentration", "make_bump",
    "BoundConstants", "PsiTrace", "build_constants", "lower_bound_quadrature",
    "lower_bound_closed_form", "comparison_ode", "check_psi_inequality",
    "estimate_gn_constant",
]

__version__ = "0.1.0"
