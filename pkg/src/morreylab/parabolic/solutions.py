"""Finite-difference samples of strong solutions and the operator L.

``L u = u_t - sum_ij a_ij D_ij u`` with ``D_ij`` the spatial second
derivatives.  Space-time fields are stored time first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .._validation import check_field
from ..embeddings.corpus import bump_profile
from ..errors import InvalidFieldError, SupportViolationError
from ..grid import GridSpec, SampledField, TimeAxis, sample
from .coefficients import CoefficientField

__all__ = [
    "StrongSolutionSample",
    "apply_L",
    "time_derivative_residual",
    "register_solutions",
    "solution_family",
    "solution_names",
    "manufactured_solutions",
]

MARGIN = 2


def _check_margin(values: np.ndarray, margin: int) -> bool:
    for ax in range(values.ndim):
        n = values.shape[ax]
        edge = np.take(values, list(range(margin)) + list(range(n - margin, n)), axis=ax)
        if np.any(edge != 0):
            return False
    return True


def _compact_derivatives(u: np.ndarray, h: float, dt: float):
    """Centered stencils on the zero-padded array (exact use of the compact support)."""
    d = u.ndim - 1
    P = np.pad(u, 1)
    inner = (slice(1, -1),) * (d + 1)

    def shifted(ax, s, ax2=None, s2=0):
        sl = list(inner)
        sl[ax] = slice(1 + s, P.shape[ax] - 1 + s)
        if ax2 is not None:
            sl[ax2] = slice(1 + s2, P.shape[ax2] - 1 + s2)
        return P[tuple(sl)]

    ut = (shifted(0, 1) - shifted(0, -1)) / (2 * dt)
    grad = [(shifted(1 + i, 1) - shifted(1 + i, -1)) / (2 * h) for i in range(d)]
    hess = [[None] * d for _ in range(d)]
    for i in range(d):
        hess[i][i] = (shifted(1 + i, 1) - 2 * u + shifted(1 + i, -1)) / (h * h)
        for j in range(i + 1, d):
            cross = shifted(1 + i, 1, 1 + j, 1) - shifted(1 + i, 1, 1 + j, -1) - shifted(1 + i, -1, 1 + j, 1) + shifted(1 + i, -1, 1 + j, -1)
            hess[i][j] = hess[j][i] = cross / (4 * h * h)
    return ut, grad, hess


def _edge_derivatives(u: np.ndarray, h: float, dt: float):
    """Second-order centered differences with second-order one-sided edges."""
    d = u.ndim - 1
    ut = np.gradient(u, dt, axis=0, edge_order=2)
    grad = [np.gradient(u, h, axis=1 + i, edge_order=2) for i in range(d)]
    hess = [[None] * d for _ in range(d)]
    for i in range(d):
        for j in range(i, d):
            hess[i][j] = hess[j][i] = np.gradient(grad[j], h, axis=1 + i, edge_order=2)
    return ut, grad, hess


@dataclass(frozen=True, eq=False)
class StrongSolutionSample:
    """A space-time field with its finite-difference derivatives.

    With ``compact=True`` the field must vanish on the outer ``MARGIN`` cell
    layers in space and time; derivatives then use the centered stencils on
    the zero extension, so no one-sided stencil is ever needed.  Otherwise
    :func:`numpy.gradient` with second-order edges is used.
    """

    u: SampledField
    ut: SampledField
    gradient: tuple
    hessian: tuple
    support: np.ndarray
    compact: bool

    @classmethod
    def from_field(cls, u: SampledField, compact: bool = True) -> "StrongSolutionSample":
        check_field(u, spatial=False, name="u")
        v = u.values
        if compact:
            if not _check_margin(v, MARGIN):
                raise SupportViolationError(f"u must vanish on the outer {MARGIN} cell layers in space and time")
            ut, grad, hess = _compact_derivatives(v, u.grid.h, u.time.dt)
        else:
            if min(v.shape) < 3:
                raise InvalidFieldError("one-sided stencils need at least 3 cells per axis")
            ut, grad, hess = _edge_derivatives(v, u.grid.h, u.time.dt)
        wrap = u.with_values
        support = v != 0
        support.setflags(write=False)
        return cls(
            u,
            wrap(ut),
            tuple(wrap(g) for g in grad),
            tuple(tuple(wrap(e) for e in row) for row in hess),
            support,
            compact,
        )

    @classmethod
    def from_function(cls, fn: Callable, grid: GridSpec, time: TimeAxis, compact: bool = True) -> "StrongSolutionSample":
        return cls.from_field(sample(fn, grid, time), compact)

    @property
    def d(self) -> int:
        return self.u.grid.n

    def hessian_entry(self, i: int, j: int) -> SampledField:
        return self.hessian[i][j]

    def supported_in(self, center, radius: float, margin: int = MARGIN) -> bool:
        """True when u vanishes outside ``B_radius(center)`` and on the first/last time layers."""
        x = self.u.grid.centers() - np.asarray(center, dtype=np.float64)
        inside = np.sum(x * x, axis=-1) < radius * radius
        if np.any(self.support & ~inside):
            return False
        steps = self.u.values.shape[0]
        return not np.any(self.support[:margin]) and not np.any(self.support[steps - margin :])


def _weighted_hessian(a: CoefficientField, s: StrongSolutionSample) -> np.ndarray:
    a.check_compatible(s.u.grid, s.u.time)
    A = a.matrix_at_cells(s.u.time)
    total = np.zeros(s.u.values.shape)
    for i in range(s.d):
        for j in range(s.d):
            total += A[..., i, j] * s.hessian[i][j].values
    return total


def apply_L(a: CoefficientField, s: StrongSolutionSample) -> SampledField:
    """``L u = u_t - sum_ij a_ij D_ij u`` cell by cell."""
    return s.u.with_values(s.ut.values - _weighted_hessian(a, s))


def time_derivative_residual(a: CoefficientField, s: StrongSolutionSample, Lu: SampledField | None = None) -> float:
    """``max |u_t - (L u + sum_ij a_ij D_ij u)|``: zero up to rounding."""
    Lu = apply_L(a, s) if Lu is None else Lu
    return float(np.max(np.abs(s.ut.values - (Lu.values + _weighted_hessian(a, s)))))


# ---------------------------------------------------------------------------
# manufactured solutions

_SOLUTIONS: dict[str, Callable] = {}


def register_solutions(name: str, factory: Callable) -> None:
    """``factory(rng, d, center, radius, T) -> u(x, t)`` supported in B_radius(center) x (0.1 T, 0.9 T)."""
    _SOLUTIONS[name] = factory


def solution_family(name: str) -> Callable:
    try:
        return _SOLUTIONS[name]
    except KeyError:
        raise InvalidFieldError(f"unknown solution family {name!r}; registered: {sorted(_SOLUTIONS)}") from None


def solution_names() -> list[str]:
    return sorted(_SOLUTIONS)


def _time_factor(rng, T):
    tc = float(rng.uniform(0.4, 0.6) * T)
    w = float(rng.uniform(0.15, 0.25) * T)
    return lambda t: bump_profile((t - tc) / w)


def _separable_bump(rng, d, center, radius, T):
    s = float(rng.uniform(0.5, 0.9)) * radius
    c = center + rng.uniform(-1, 1, d) * (radius - s) / np.sqrt(d)
    amp = float(rng.uniform(0.5, 2.0))
    ft = _time_factor(rng, T)
    return lambda x, t: amp * bump_profile(np.linalg.norm(x - c, axis=-1) / s) * ft(t)


def _tensor_bump(rng, d, center, radius, T):
    widths = rng.uniform(0.3, 0.6, d) * radius
    c = center + rng.uniform(-1, 1, d) * (radius - np.sqrt(d) * widths.max()) / np.sqrt(d)
    ft = _time_factor(rng, T)
    return lambda x, t: np.prod(bump_profile((x - c) / widths), axis=-1) * ft(t)


def _moving_bump(rng, d, center, radius, T):
    s = float(rng.uniform(0.4, 0.6)) * radius
    v = rng.uniform(-1, 1, d)
    v *= (radius - s) * 0.8 / (np.linalg.norm(v) + 1e-300)
    ft = _time_factor(rng, T)
    return lambda x, t: bump_profile(np.linalg.norm(x - center - v * (t[..., None] / T - 0.5), axis=-1) / s) * ft(t)


register_solutions("separable-bump", _separable_bump)
register_solutions("tensor-bump", _tensor_bump)
register_solutions("moving-bump", _moving_bump)


def manufactured_solutions(names=("separable-bump", "tensor-bump", "moving-bump"), count: int = 10, seed: int = 0, d: int = 2, center=None, radius: float = 0.5, T: float = 1.0):
    """``count`` functions ``(id, u(x, t))`` cycling through the named families."""
    rng = np.random.default_rng(seed)
    center = np.zeros(d) if center is None else np.asarray(center, dtype=np.float64)
    out = []
    for k in range(count):
        name = names[k % len(names)]
        out.append((f"{k:03d}-{name}", solution_family(name)(rng, d, center, radius, T)))
    return out
