"""Maximal functions, Riesz potential, parabolic metric and singular integrals."""

from .estimators import (
    Commutator,
    FractionalMaximal,
    HardyLittlewoodMaximal,
    RieszPotential,
    SharpMaximal,
    TruncatedSingularIntegral,
)
from .kernels import KernelDescriptor, KernelReport, get_kernel, kernel_names, kernel_validate, register_kernel, sphere_quadrature
from .maximal import MaximalParams, fractional_maximal, hl_maximal, sharp_maximal, uncentered_maximal
from .metric import parabolic_dilation, parabolic_distance, quasi_triangle_constant
from .riesz import riesz_potential, riesz_table, self_cell_integral
from .singular import (
    EpsilonLimitReport,
    EpsilonSchedule,
    commutator,
    epsilon_limit,
    kernel_table,
    truncated_singular_integral,
)

__all__ = [name for name in dir() if not name.startswith("_")]
