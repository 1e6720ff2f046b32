"""Truncated singular integrals, commutators, and their epsilon -> 0 behaviour.

Truncation keeps the cells whose center lies strictly outside the
epsilon-ball of the kernel's metric.  Euclidean kernels act on each time
slice; parabolic kernels act on the whole space-time array (time first),
with cell weight ``h^n dt``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._validation import check_field, check_same_grid
from ..errors import InvalidFieldError, InvalidKernelError, InvalidRadiiError, TruncationBelowGridError
from ..grid import GridSpec, SampledField, TimeAxis, _shift_slices
from ..norms import MixedParams, MorreyParams, mixed_morrey_norm, morrey_norm
from ._convolve import convolve_table
from .kernels import KernelDescriptor, get_kernel
from .metric import parabolic_distance

__all__ = [
    "EpsilonSchedule",
    "EpsilonLimitReport",
    "kernel_table",
    "truncated_singular_integral",
    "commutator",
    "epsilon_limit",
]

_EDGE = 1e-12


@dataclass(frozen=True)
class EpsilonSchedule:
    """Strictly decreasing truncation radii."""

    epsilons: tuple

    def __post_init__(self):
        eps = tuple(float(e) for e in self.epsilons)
        if not eps:
            raise InvalidRadiiError("epsilon schedule is empty")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise InvalidRadiiError(f"epsilon schedule must be strictly decreasing: {eps}")
        object.__setattr__(self, "epsilons", eps)

    @classmethod
    def dyadic(cls, largest: float, terms: int) -> "EpsilonSchedule":
        return cls(tuple(largest / 2**k for k in range(terms)))

    def check_for(self, h: float) -> "EpsilonSchedule":
        if self.epsilons[-1] < h * (1 - _EDGE):
            raise TruncationBelowGridError(f"smallest epsilon {self.epsilons[-1]} is below the grid spacing {h}")
        return self

    def __iter__(self):
        return iter(self.epsilons)

    def __len__(self):
        return len(self.epsilons)


def _resolve(k) -> KernelDescriptor:
    return get_kernel(k) if isinstance(k, str) else k


def _layout(f: SampledField, k: KernelDescriptor):
    """Return (number of trailing axes the kernel acts on, spacings, weight)."""
    if k.n != f.grid.n:
        raise InvalidKernelError(f"kernel {k.name!r} is for n={k.n}, field has n={f.grid.n}")
    h = f.grid.h
    if k.metric == "parabolic":
        if f.time is None:
            raise InvalidFieldError(f"parabolic kernel {k.name!r} needs a space-time field")
        return k.n + 1, (f.time.dt,) + (h,) * k.n, f.grid.cell_volume * f.time.dt
    return k.n, (h,) * k.n, f.grid.cell_volume


def _offset_points(extent, spacings, parabolic: bool) -> np.ndarray:
    """Displacement vectors for all table offsets, in the kernel's coordinate order."""
    axes = [np.arange(-(e - 1), e) * s for e, s in zip(extent, spacings)]
    z = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    if parabolic:
        z = np.concatenate([z[..., 1:], z[..., :1]], axis=-1)  # time last
    return z


def _metric(z: np.ndarray, parabolic: bool) -> np.ndarray:
    return parabolic_distance(z) if parabolic else np.sqrt(np.sum(z * z, axis=-1))


def kernel_table(k, grid: GridSpec, eps: float, time: TimeAxis | None = None) -> np.ndarray:
    """Weights ``k(z_d) * cell weight`` for offsets with metric(z_d) > eps, else 0."""
    k = _resolve(k)
    if k.kind != "classical":
        raise InvalidKernelError("kernel tables exist only for classical kernels")
    parabolic = k.metric == "parabolic"
    extent = ((time.steps,) if parabolic else ()) + grid.extent
    spacings = ((time.dt,) if parabolic else ()) + (grid.h,) * grid.n
    weight = grid.cell_volume * (time.dt if parabolic else 1.0)
    z = _offset_points(extent, spacings, parabolic)
    keep = _metric(z, parabolic) > eps * (1 + _EDGE)
    table = np.zeros(z.shape[:-1])
    table[keep] = np.asarray(k(z[keep]), dtype=np.float64) * weight
    if not np.all(np.isfinite(table)):
        raise InvalidKernelError(f"kernel {k.name!r} is not finite off the truncation ball")
    return table


def _check_eps(f: SampledField, eps: float):
    if eps < f.grid.h * (1 - _EDGE):
        raise TruncationBelowGridError(f"epsilon={eps} is below the grid spacing {f.grid.h}")


def _apply(values: np.ndarray, f: SampledField, k: KernelDescriptor, eps: float, method: str) -> np.ndarray:
    ndim, spacings, weight = _layout(f, k)
    parabolic = k.metric == "parabolic"
    if k.kind == "classical":
        table = kernel_table(k, f.grid, eps, f.time if parabolic else None)
        return convolve_table(values, table, ndim, method)
    # variable kernel: k(x, x - y) depends on the base point, sum offset by offset
    extent = values.shape[values.ndim - ndim :]
    lead = (slice(None),) * (values.ndim - ndim)
    base = _offset_points(extent, spacings, parabolic)  # reused for absolute positions below
    centre = tuple(e - 1 for e in extent)
    X = base[tuple(slice(c, None) for c in centre)]
    if parabolic:
        X = X + np.array(f.grid.origin + (0.0,)) + np.array(spacings[1:] + spacings[:1]) / 2
    else:
        X = X + np.array(f.grid.origin) + np.array(spacings) / 2
    keep = _metric(base, parabolic) > eps * (1 + _EDGE)
    out = np.zeros_like(values)
    for idx in zip(*np.nonzero(keep)):
        d = np.array(idx) - np.array(centre)
        dst, src = _shift_slices(-d, extent)
        kv = k(base[idx], X[dst]) * weight
        out[lead + dst] += kv * values[lead + src]
    return out


def truncated_singular_integral(f: SampledField, k, eps: float, method: str = "direct") -> SampledField:
    """``K_eps f(x) = sum over cells y with metric(x - y) > eps of k(x, x - y) f(y) * cell weight``."""
    check_field(f)
    k = _resolve(k)
    _check_eps(f, eps)
    return f.with_values(_apply(f.values, f, k, float(eps), method))


def commutator(a: SampledField, f: SampledField, k, eps: float, method: str = "direct") -> SampledField:
    """``C_eps[a, f] = K_eps(a f) - a K_eps f``.

    Evaluated with ``a`` shifted by a reference value, which leaves the
    commutator unchanged and makes it exactly zero for constant ``a``.
    """
    check_field(a, name="a")
    check_field(f)
    check_same_grid(a, f)
    k = _resolve(k)
    _check_eps(f, eps)
    b = a.values - a.values.flat[0]
    out = _apply(b * f.values, f, k, float(eps), method) - b * _apply(f.values, f, k, float(eps), method)
    return f.with_values(out)


@dataclass(frozen=True)
class EpsilonLimitReport:
    epsilons: tuple
    distances: tuple
    tolerance: float

    @property
    def monotone(self) -> bool:
        d = self.distances
        return all(b < a or (a == 0 and b == 0) for a, b in zip(d, d[1:]))

    @property
    def converged(self) -> bool:
        return self.monotone and (not self.distances or self.distances[-1] <= self.tolerance)

    def ratios(self) -> tuple:
        d = self.distances
        return tuple(b / a if a > 0 else 0.0 for a, b in zip(d, d[1:]))


def _norm(field: SampledField, norm) -> float:
    if isinstance(norm, MixedParams):
        return mixed_morrey_norm(field, norm).value
    if isinstance(norm, MorreyParams):
        if field.is_spatial:
            return morrey_norm(field, norm).value
        return max(morrey_norm(s, norm).value for s in field.slices())
    raise InvalidFieldError("norm must be MixedParams or MorreyParams")


def epsilon_limit(op, schedule: EpsilonSchedule, norm, tolerance: float = float("inf")):
    """Run ``op(eps)`` along the schedule and measure consecutive differences.

    Returns the field at the smallest epsilon and an :class:`EpsilonLimitReport`.
    A non-monotone tail is reported, not raised.
    """
    if len(schedule) < 3:
        raise InvalidRadiiError("epsilon_limit needs a schedule of at least 3 radii")
    fields = [op(e) for e in schedule]
    dist = tuple(_norm(b - a, norm) for a, b in zip(fields, fields[1:]))
    return fields[-1], EpsilonLimitReport(schedule.epsilons, dist, float(tolerance))
