"""Fundamental solution of the constant-coefficient operator u_t - a_ij D_ij u.

Points are ``(zeta, tau)`` with ``zeta`` in R^d.  The prefactor exponent is
selected by ``convention``:

``"printed"``
    ``(1 - N) / 2`` where ``N = d + 1`` counts all space-time coordinates.
    Numerically this is the heat-kernel exponent ``-d/2``.
``"printed-spatial"``
    ``(1 - d) / 2``: the same formula with ``N`` read as the number of
    spatial coordinates.  It is not a fundamental solution (off by a factor
    sqrt(4 pi tau)); it is kept for comparison.
``"heat"``
    ``-d / 2`` written directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidCoefficientsError

__all__ = [
    "CONVENTIONS",
    "FundamentalSolutionParams",
    "fundamental_solution",
    "gamma_gradient",
    "gamma_second_derivatives",
]

CONVENTIONS = ("printed", "printed-spatial", "heat")


def prefactor_exponent(d: int, convention: str) -> float:
    if convention == "printed":
        return (1 - (d + 1)) / 2
    if convention == "printed-spatial":
        return (1 - d) / 2
    if convention == "heat":
        return -d / 2
    raise InvalidCoefficientsError(f"unknown fundamental solution convention {convention!r}")


@dataclass(frozen=True, eq=False)
class FundamentalSolutionParams:
    """Frozen coefficient matrix ``a``, its inverse ``A`` and the Gaussian normalizer."""

    a: np.ndarray
    A: np.ndarray
    normalizer: float
    exponent: float
    convention: str

    @classmethod
    def from_matrix(cls, a, convention: str = "printed") -> "FundamentalSolutionParams":
        a = np.array(a, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidCoefficientsError("coefficient matrix must be square")
        if not np.array_equal(a, a.T):
            raise InvalidCoefficientsError("coefficient matrix must be symmetric")
        if np.min(np.linalg.eigvalsh(a)) <= 0:
            raise InvalidCoefficientsError("coefficient matrix must be positive definite")
        A = np.linalg.inv(a)
        A = (A + A.T) / 2
        det = float(np.linalg.det(a))
        a.setflags(write=False)
        A.setflags(write=False)
        return cls(a, A, 1.0 / math.sqrt(det), prefactor_exponent(a.shape[0], convention), convention)

    @classmethod
    def identity(cls, d: int, convention: str = "printed") -> "FundamentalSolutionParams":
        return cls.from_matrix(np.eye(d), convention)

    @property
    def d(self) -> int:
        return self.a.shape[0]

    @property
    def second_derivative_degree(self) -> float:
        """Parabolic homogeneity degree of the second zeta-derivatives."""
        return 2 * self.exponent - 2


def _split(params, zeta, tau):
    zeta = np.asarray(zeta, dtype=np.float64)
    tau = np.asarray(tau, dtype=np.float64)
    if zeta.shape[-1] != params.d:
        raise InvalidCoefficientsError(f"zeta must have {params.d} components")
    return zeta, tau


def _gamma_and_Az(params, zeta, tau):
    zeta, tau = _split(params, zeta, tau)
    Az = zeta @ params.A
    pos = tau > 0
    ts = np.where(pos, tau, 1.0)
    q = np.sum(Az * zeta, axis=-1)
    g = np.where(pos, (4 * math.pi * ts) ** params.exponent * params.normalizer * np.exp(-q / (4 * ts)), 0.0)
    return g, Az, ts, pos


def fundamental_solution(params: FundamentalSolutionParams, zeta, tau):
    """Gamma(zeta, tau); identically 0 for tau <= 0."""
    g, _, _, _ = _gamma_and_Az(params, zeta, tau)
    return float(g) if np.ndim(g) == 0 else g


def gamma_gradient(params: FundamentalSolutionParams, zeta, tau) -> np.ndarray:
    """First zeta-derivatives Gamma_j, shape ``(..., d)``."""
    g, Az, ts, _ = _gamma_and_Az(params, zeta, tau)
    return (g / (-2 * ts))[..., None] * Az


def gamma_second_derivatives(params: FundamentalSolutionParams, zeta, tau) -> np.ndarray:
    """Second zeta-derivatives Gamma_ij, shape ``(..., d, d)``; zero where tau <= 0."""
    g, Az, ts, _ = _gamma_and_Az(params, zeta, tau)
    ts = ts[..., None, None]
    outer = Az[..., :, None] * Az[..., None, :] / (4 * ts * ts)
    return g[..., None, None] * (outer - params.A / (2 * ts))
