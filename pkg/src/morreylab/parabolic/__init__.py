"""Nondivergence parabolic operator: coefficients, strong solutions, fundamental solution, a-priori checks."""

from .apriori import AprioriResult, apriori_check, tail_stable
from .coefficients import (
    CoefficientField,
    CoefficientReport,
    coefficient_family,
    coefficient_names,
    register_coefficients,
    validate_coefficients,
)
from .fundamental import (
    CONVENTIONS,
    FundamentalSolutionParams,
    fundamental_solution,
    gamma_gradient,
    gamma_second_derivatives,
    prefactor_exponent,
)
from .representation import RepresentationTerms, boundary_constant, gamma_kernel, representation_check, representation_rhs
from .solutions import (
    StrongSolutionSample,
    apply_L,
    manufactured_solutions,
    register_solutions,
    solution_family,
    solution_names,
    time_derivative_residual,
)

__all__ = [name for name in dir() if not name.startswith("_")]
