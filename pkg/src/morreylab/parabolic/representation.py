"""Local representation of D_ij u through the frozen fundamental solution.

For a base point x with frozen matrix a(x), write L = L_x + (L - L_x) where
``L_x = d/dt - a_ij(x) D_ij``.  Then

    D_ij u(x) = PV int Gamma_ij(x; z) Lu(x - z) dz
              + PV int Gamma_ij(x; z) [a_hk(x - z) - a_hk(x)] D_hk u(x - z) dz
              + Lu(x) int_{|z| = 1} z_i Gamma_j(x; z) dsigma(z)

with z = (zeta, tau) in space-time and the principal values taken over
``rho(z) > eps``.  The unit parabolic sphere is the Euclidean unit sphere,
with outer normal z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidCoefficientsError, TruncationBelowGridError
from ..grid import SampledField, _shift_slices
from ..norms import MixedParams
from ..operators import EpsilonLimitReport, EpsilonSchedule, KernelDescriptor, sphere_quadrature, truncated_singular_integral
from ..operators.singular import _metric, _offset_points
from .coefficients import CoefficientField
from .fundamental import FundamentalSolutionParams, gamma_gradient, gamma_second_derivatives, prefactor_exponent
from .solutions import StrongSolutionSample, apply_L

__all__ = [
    "gamma_kernel",
    "boundary_constant",
    "RepresentationTerms",
    "representation_rhs",
    "representation_check",
]

_EDGE = 1e-12


def gamma_kernel(params: FundamentalSolutionParams, i: int, j: int) -> KernelDescriptor:
    """``Gamma_ij`` of a constant matrix as a classical parabolic kernel (time last)."""
    d = params.d

    def ev(z):
        return gamma_second_derivatives(params, z[..., :d], z[..., d])[..., i, j]

    return KernelDescriptor(f"gamma-{i + 1}{j + 1}", "classical", "parabolic", d, params.second_derivative_degree, ev)


def boundary_constant(params: FundamentalSolutionParams, i: int, j: int, order: int = 32) -> float:
    """``int_{|z|=1} z_i Gamma_j(z) dsigma`` over the unit sphere of space-time.

    Gamma vanishes for tau <= 0, so only the upper hemisphere contributes.
    It is parametrized as ``z = (sin(theta) omega, cos(theta))`` with
    Gauss-Legendre nodes in ``theta`` on (0, pi/2) and the sphere rule of the
    given order for ``omega``; the integrand is smooth (flat at tau = 0).
    """
    d = params.d
    x, w = np.polynomial.legendre.leggauss(2 * order)
    theta = (x + 1) * (math.pi / 4)
    wt = w * (math.pi / 4) * np.sin(theta) ** (d - 1)
    omega, wo = sphere_quadrature(d, order)
    zeta = np.sin(theta)[:, None, None] * omega[None]
    tau = np.broadcast_to(np.cos(theta)[:, None], zeta.shape[:2])
    G = gamma_gradient(params, zeta, tau)
    return float(np.sum(wt[:, None] * wo[None] * zeta[..., i] * G[..., j]))


@dataclass(frozen=True, eq=False)
class RepresentationTerms:
    """The three terms per ordered pair ``(i, j)`` at one truncation radius."""

    eps: float
    principal: dict
    commutator: dict
    boundary: dict

    def total(self, i: int, j: int) -> SampledField:
        return self.principal[i, j] + self.commutator[i, j] + self.boundary[i, j]

    @property
    def pairs(self) -> list:
        return sorted(self.principal)


def _pairs(d, pairs):
    if pairs is None:
        return [(i, j) for i in range(d) for j in range(i, d)]
    return [tuple(p) for p in pairs]


def _cell_gamma_ij(A, normalizer, exponent, zeta, tau, i, j):
    """Gamma_ij for one displacement and per-cell inverse matrices ``A`` (..., d, d)."""
    Az = A @ zeta
    q = Az @ zeta
    g = (4 * math.pi * tau) ** exponent * normalizer * np.exp(-q / (4 * tau))
    return g * (Az[..., i] * Az[..., j] / (4 * tau * tau) - A[..., i, j] / (2 * tau))


def _unique_boundary(M: np.ndarray, pairs, order, convention) -> dict:
    """Boundary constants per cell, evaluated once per distinct matrix."""
    d = M.shape[-1]
    flat = M.reshape(-1, d * d)
    uniq, inverse = np.unique(flat, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    out = {}
    consts = {p: np.empty(len(uniq)) for p in pairs}
    for k, row in enumerate(uniq):
        params = FundamentalSolutionParams.from_matrix(row.reshape(d, d), convention)
        for p in pairs:
            consts[p][k] = boundary_constant(params, *p, order=order)
    for p in pairs:
        out[p] = consts[p][inverse].reshape(M.shape[:-2])
    return out


def representation_rhs(
    s: StrongSolutionSample,
    a: CoefficientField,
    eps: float,
    order: int = 32,
    pairs=None,
    method: str = "fft",
    convention: str = "printed",
) -> RepresentationTerms:
    """Evaluate the three terms of the representation of ``D_ij u`` at truncation ``eps``.

    Constant coefficients use one classical kernel table and an exact zero
    commutator term.  Variable coefficients sum offset by offset with the
    kernel frozen at every base cell, which costs O(cells^2) and is meant
    for small grids.
    """
    if not s.compact:
        raise InvalidCoefficientsError("the representation needs a compactly supported sample")
    grid, time = s.u.grid, s.u.time
    a.check_compatible(grid, time)
    if eps < grid.h * (1 - _EDGE):
        raise TruncationBelowGridError(f"epsilon={eps} is below the grid spacing {grid.h}")
    d = s.d
    pairs = _pairs(d, pairs)
    Lu = apply_L(a, s)
    zero = s.u.with_values(np.zeros(s.u.values.shape))
    if a.is_constant:
        m = a.values.reshape(-1, d, d)[0]
        params = FundamentalSolutionParams.from_matrix(m, convention)
        principal, commutator, boundary = {}, {}, {}
        for i, j in pairs:
            principal[i, j] = truncated_singular_integral(Lu, gamma_kernel(params, i, j), eps, method)
            commutator[i, j] = zero
            boundary[i, j] = Lu.with_values(boundary_constant(params, i, j, order) * Lu.values)
        return RepresentationTerms(float(eps), principal, commutator, boundary)
    return _variable_terms(s, a, Lu, float(eps), order, pairs, convention)


def _variable_terms(s, a, Lu, eps, order, pairs, convention):
    grid, time = s.u.grid, s.u.time
    d = s.d
    M = a.matrix_at_cells(time)
    if np.any(M != np.swapaxes(M, -1, -2)) or np.any(np.linalg.eigvalsh(M) <= 0):
        raise InvalidCoefficientsError("coefficients must be symmetric positive definite at every cell")
    A = np.linalg.inv(M)
    A = (A + np.swapaxes(A, -1, -2)) / 2
    normalizer = 1 / np.sqrt(np.linalg.det(M))
    exponent = prefactor_exponent(d, convention)
    extent = s.u.values.shape
    spacings = (time.dt,) + (grid.h,) * d
    weight = grid.cell_volume * time.dt
    z_all = _offset_points(extent, spacings, True)
    keep = (_metric(z_all, True) > eps * (1 + _EDGE)) & (z_all[..., d] > 0)
    centre = np.array([e - 1 for e in extent])
    hess = [[s.hessian[h][k].values for k in range(d)] for h in range(d)]
    principal = {p: np.zeros(extent) for p in pairs}
    commutator = {p: np.zeros(extent) for p in pairs}
    for idx in zip(*np.nonzero(keep)):
        off = np.array(idx) - centre
        dst, src = _shift_slices(-off, extent)
        z = z_all[idx]
        Ad, nd = A[dst], normalizer[dst]
        # L_x u(y) - L u(y) = sum_hk (a_hk(y) - a_hk(x)) D_hk u(y), y = x - z
        extra = np.zeros(Ad.shape[:-2])
        for h in range(d):
            for k in range(d):
                extra += (M[src][..., h, k] - M[dst][..., h, k]) * hess[h][k][src]
        for i, j in pairs:
            kv = _cell_gamma_ij(Ad, nd, exponent, z[:d], z[d], i, j) * weight
            principal[i, j][dst] += kv * Lu.values[src]
            commutator[i, j][dst] += kv * extra
    bconst = _unique_boundary(M, pairs, order, convention)
    wrap = s.u.with_values
    return RepresentationTerms(
        eps,
        {p: wrap(principal[p]) for p in pairs},
        {p: wrap(commutator[p]) for p in pairs},
        {p: wrap(bconst[p] * Lu.values) for p in pairs},
    )


def representation_check(
    s: StrongSolutionSample,
    a: CoefficientField,
    schedule: EpsilonSchedule,
    params: MixedParams,
    order: int = 32,
    pairs=None,
    method: str = "fft",
    convention: str = "printed",
) -> dict:
    """Mixed-norm distance of the representation to the finite-difference ``D_ij u`` per epsilon.

    Returns ``{(i, j): EpsilonLimitReport}``; distances are relative to the
    norm of ``D_ij u``.
    """
    from ..norms import mixed_morrey_norm

    schedule.check_for(s.u.grid.h)
    pairs = _pairs(s.d, pairs)
    dist = {p: [] for p in pairs}
    for eps in schedule:
        terms = representation_rhs(s, a, eps, order, pairs, method, convention)
        for i, j in pairs:
            target = s.hessian[i][j]
            scale = mixed_morrey_norm(target, params).value
            err = mixed_morrey_norm(terms.total(i, j) - target, params).value
            dist[i, j].append(err / scale if scale > 0 else err)
    return {p: EpsilonLimitReport(schedule.epsilons, tuple(v), math.inf) for p, v in dist.items()}
