"""Hadamard fractional operators, test-function estimates and critical-exponent criteria
for time-fractional Schrodinger-type equations with logarithmic-power nonlinearity."""

__version__ = "0.1.0"

from .criterion import (  # noqa: E402
    CriterionReport,
    ProblemParams,
    SignFunctionals,
    evaluate,
    region_combined,
    region_T1,
    region_T2,
    sign_functionals,
)
from .initial_data import RadialProfile, closed_form_integral, cutoff_weighted_integral, sphere_area, total_integral  # noqa: E402
from .kernels import (  # noqa: E402
    Constant,
    FracParams,
    LogGridFunction,
    LogPower,
    MuFamily,
    Sampled,
    conjugate_check,
    hadamard_caputo_derivative,
    hadamard_left_integral,
    hadamard_right_integral,
    integration_by_parts_residual,
    rl_left_integral,
    rl_right_integral,
)
from .quadrature import QuadratureError, QuadratureSpec  # noqa: E402
from .special import beta_fn, gamma_fn  # noqa: E402
from .testfunctions import CutoffParams, MuParams, TestFunction  # noqa: E402

__all__ = [
    "Constant",
    "CriterionReport",
    "CutoffParams",
    "FracParams",
    "LogGridFunction",
    "LogPower",
    "MuFamily",
    "MuParams",
    "ProblemParams",
    "QuadratureError",
    "QuadratureSpec",
    "RadialProfile",
    "Sampled",
    "SignFunctionals",
    "TestFunction",
    "beta_fn",
    "closed_form_integral",
    "conjugate_check",
    "cutoff_weighted_integral",
    "evaluate",
    "gamma_fn",
    "hadamard_caputo_derivative",
    "hadamard_left_integral",
    "hadamard_right_integral",
    "integration_by_parts_residual",
    "region_T1",
    "region_T2",
    "region_combined",
    "rl_left_integral",
    "rl_right_integral",
    "sign_functionals",
    "sphere_area",
    "total_integral",
]
