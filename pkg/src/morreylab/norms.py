"""Lebesgue, Morrey, mixed Morrey, BMO and VMO quantities of sampled fields.

Suprema over all centers and radii are taken over every cell center and a
finite :class:`~morreylab.grid.RadiusSet` (dyadic by default).  Morrey and
mixed norms return a :class:`NormReport` carrying the maximizing witness, and
the reported value is always re-evaluated at that witness by direct summation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidExponentError, InvalidFieldError, RadiusTooSmallError
from .grid import (
    GridSpec,
    RadiusSet,
    SampledField,
    SummedAreaTable,
    _halfwidth,
    _shift_slices,
    ball_counts,
    ball_offsets,
    ball_sums,
    cube_sums,
    region_integral,
)

__all__ = [
    "MorreyParams",
    "MixedParams",
    "NormReport",
    "lp_norm",
    "morrey_norm",
    "morrey_quotient",
    "spatial_morrey_profile",
    "mixed_morrey_norm",
    "mixed_quotient",
    "ball_oscillation",
    "bmo_seminorm",
    "vmo_modulus",
]


@dataclass(frozen=True)
class MorreyParams:
    """Exponents of a Morrey space L^{p,lam} on R^n.

    The default constructor enforces ``1 < p < inf`` and ``0 < lam < n``;
    ``relaxed=True`` admits the boundary cases ``p = 1`` and ``lam = 0``.
    """

    p: float
    lam: float
    n: int
    relaxed: bool = False

    def __post_init__(self):
        p, lam, n = float(self.p), float(self.lam), self.n
        if int(n) != n or n < 1:
            raise InvalidExponentError(f"dimension must be a positive integer, got {n}")
        if self.relaxed:
            ok = 1 <= p < math.inf and 0 <= lam < n
        else:
            ok = 1 < p < math.inf and 0 < lam < n
        if not ok:
            raise InvalidExponentError(
                f"inadmissible Morrey exponents p={p}, lam={lam}, n={n} (relaxed={self.relaxed})"
            )
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "n", int(n))

    def describe(self) -> str:
        return f"p={self.p!r};lam={self.lam!r}"


@dataclass(frozen=True)
class MixedParams:
    """Exponents of the mixed space L^{q,mu}(0,T, L^{p,lam}).

    Strict mode requires ``1 < q < inf`` and ``0 < mu < n``.  Relaxed mode
    admits ``q = 1`` and ``mu = 0``.
    """

    q: float
    mu: float
    spatial: MorreyParams
    relaxed: bool = False

    def __post_init__(self):
        q, mu, n = float(self.q), float(self.mu), self.spatial.n
        if self.relaxed:
            ok = 1 <= q < math.inf and 0 <= mu < n
        else:
            ok = 1 < q < math.inf and 0 < mu < n
        if not ok:
            raise InvalidExponentError(f"inadmissible temporal exponents q={q}, mu={mu} (n={n})")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "mu", mu)

    @classmethod
    def of(cls, q, mu, p, lam, n, relaxed=False) -> "MixedParams":
        return cls(q, mu, MorreyParams(p, lam, n, relaxed=relaxed), relaxed=relaxed)

    def describe(self) -> str:
        return f"q={self.q!r};mu={self.mu!r};{self.spatial.describe()}"


@dataclass(frozen=True)
class NormReport:
    name: str
    value: float
    center: tuple[float, ...] | None = None
    radius: float | None = None
    t0: float | None = None
    time_radius: float | None = None
    params: str = ""

    def csv_header(self) -> list[str]:
        return ["norm", "params", "value", "center", "radius", "t0", "time_radius"]

    def csv_row(self) -> list[str]:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, tuple):
                return " ".join(repr(float(c)) for c in v)
            return repr(float(v))

        return [self.name, self.params, fmt(self.value), fmt(self.center), fmt(self.radius), fmt(self.t0), fmt(self.time_radius)]


def _radii(radii, grid: GridSpec) -> RadiusSet:
    if radii is None:
        return RadiusSet.for_grid(grid)
    if not isinstance(radii, RadiusSet):
        radii = RadiusSet(tuple(radii))
    return radii


def _time_radii(radii, f: SampledField) -> RadiusSet:
    if radii is None:
        return RadiusSet.for_time(f.time)
    if not isinstance(radii, RadiusSet):
        radii = RadiusSet(tuple(radii))
    return radii


def lp_norm(f: SampledField, p: float) -> float:
    """(integral of |f|^p)^(1/p) over the whole box (space-time for fields with time)."""
    if not p >= 1:
        raise InvalidExponentError(f"p must be >= 1, got {p}")
    w = f.grid.cell_volume * (f.time.dt if f.time else 1.0)
    total = float(np.sum(np.abs(f.values) ** p)) * w
    return total ** (1.0 / p)


def _region_sums(a: np.ndarray, grid: GridSpec, r: float, shape: str) -> np.ndarray:
    if shape == "ball":
        return ball_sums(a, grid, r)
    if shape == "cube":
        return cube_sums(a, grid, r)
    raise InvalidFieldError(f"unknown region shape {shape!r}")


def _scan(a, grid, lam, radii, shape, mask):
    """Best Morrey quotient ``r^-lam * integral`` per batch entry with its argmax."""
    batch = a.shape[: a.ndim - grid.n]
    flat = a.reshape((-1,) + grid.extent)
    best = np.full(flat.shape[0], -np.inf)
    arg_idx = np.zeros(flat.shape[0], dtype=np.int64)
    arg_r = np.zeros(flat.shape[0])
    vol = grid.cell_volume
    for r in radii:
        Q = _region_sums(flat, grid, r, shape) * (vol / r**lam)
        Q = Q.reshape(flat.shape[0], -1)
        if mask is not None:
            Q[:, ~mask.reshape(-1)] = -np.inf
        idx = np.argmax(Q, axis=1)
        val = Q[np.arange(Q.shape[0]), idx]
        better = val > best
        best = np.where(better, val, best)
        arg_idx = np.where(better, idx, arg_idx)
        arg_r = np.where(better, r, arg_r)
    return best.reshape(batch), arg_idx.reshape(batch), arg_r.reshape(batch)


def _integrand(values: np.ndarray, p: float, mask) -> np.ndarray:
    a = np.abs(values) ** p
    if mask is not None:
        a = np.where(mask, a, 0.0)
    return a


def _check_mask(mask, grid):
    if mask is None:
        return None
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != grid.extent:
        raise InvalidFieldError("domain mask must match the spatial grid")
    return mask


def morrey_quotient(f: SampledField, params: MorreyParams, center, radius: float, shape="ball", mask=None) -> float:
    """(r^-lam * integral over B_r(center) of |f|^p)^(1/p) by direct summation."""
    mask = _check_mask(mask, f.grid)
    a = _integrand(f.values, params.p, mask)
    if shape == "cube":
        I = SummedAreaTable(a, f.grid).cube_integral(center, radius)
    else:
        I = region_integral(a, center, radius, grid=f.grid)
    return (I / radius**params.lam) ** (1.0 / params.p)


def morrey_norm(
    f: SampledField, params: MorreyParams, radii=None, shape: str = "ball", mask=None
) -> NormReport:
    """Morrey norm of a spatial field, sup over cell centers and ``radii``.

    ``mask`` restricts the domain: the integrand is zeroed and centers are
    taken only inside the mask.
    """
    if not f.is_spatial:
        raise InvalidFieldError("morrey_norm needs a spatial field; use mixed_morrey_norm")
    grid = f.grid
    radii = _radii(radii, grid)
    mask = _check_mask(mask, grid)
    a = _integrand(f.values, params.p, mask)
    best, idx, r = _scan(a, grid, params.lam, radii, shape, mask)
    center = tuple(float(c) for c in grid.point(np.unravel_index(int(idx), grid.extent)))
    value = morrey_quotient(f, params, center, float(r), shape, mask)
    return NormReport("morrey", value, center, float(r), params=params.describe())


def spatial_morrey_profile(f: SampledField, params: MorreyParams, radii=None, shape="ball", mask=None):
    """Per time slice: the p-th power of the spatial Morrey norm and its witness.

    Returns ``(S, centers, radii)`` with ``S`` of length ``steps``.
    """
    if f.time is None:
        raise InvalidFieldError("field has no time axis")
    grid = f.grid
    radii = _radii(radii, grid)
    mask = _check_mask(mask, grid)
    a = _integrand(f.values, params.p, mask)
    best, idx, rr = _scan(a, grid, params.lam, radii, shape, mask)
    centers = [tuple(float(c) for c in grid.point(np.unravel_index(int(i), grid.extent))) for i in idx]
    return np.maximum(best, 0.0), centers, rr


def _temporal_windows(steps: int, dt: float, rho: float):
    w = _halfwidth((rho / dt) ** 2 * (1 - 1e-10))
    for j in range(steps):
        yield j, max(0, j - w), min(steps, j + w + 1)


def _temporal_sup(g: np.ndarray, dt: float, mu: float, time_radii: RadiusSet):
    best, arg = -np.inf, (0, time_radii.radii[0])
    for rho in time_radii:
        scale = dt / rho**mu
        for j, lo, hi in _temporal_windows(g.size, dt, rho):
            v = float(np.sum(g[lo:hi])) * scale
            if v > best:
                best, arg = v, (j, rho)
    return best, arg


def mixed_quotient(
    f: SampledField, params: MixedParams, t0_index: int, time_radius: float, radii=None, shape="ball", mask=None
) -> float:
    """The mixed Morrey quotient for one temporal window, inner sups recomputed."""
    S, _, _ = spatial_morrey_profile(f, params.spatial, radii, shape, mask)
    g = S ** (params.q / params.spatial.p)
    dt = f.time.dt
    for j, lo, hi in _temporal_windows(f.time.steps, dt, time_radius):
        if j == t0_index:
            return (float(np.sum(g[lo:hi])) * (dt / time_radius**params.mu)) ** (1.0 / params.q)
    raise IndexError(t0_index)


def mixed_morrey_norm(
    f: SampledField,
    params: MixedParams,
    radii=None,
    time_radii=None,
    shape: str = "ball",
    mask=None,
    profile=None,
) -> NormReport:
    """Mixed Morrey norm: temporal Morrey sup of the sliced spatial Morrey norm.

    Spatial and temporal radii are independent sup variables.  ``profile``
    may pass a precomputed :func:`spatial_morrey_profile` result for the same
    field, spatial exponents, radii, shape and mask.
    """
    if f.time is None:
        raise InvalidFieldError("mixed_morrey_norm needs a field with a time axis")
    time_radii = _time_radii(time_radii, f)
    S, centers, rr = profile if profile is not None else spatial_morrey_profile(f, params.spatial, radii, shape, mask)
    g = S ** (params.q / params.spatial.p)
    _, (j, rho) = _temporal_sup(g, f.time.dt, params.mu, time_radii)
    dt = f.time.dt
    lo, hi = next((lo, hi) for jj, lo, hi in _temporal_windows(f.time.steps, dt, rho) if jj == j)
    value = (float(np.sum(g[lo:hi])) * (dt / rho**params.mu)) ** (1.0 / params.q)
    return NormReport(
        "mixed-morrey",
        value,
        centers[j],
        float(rr[j]),
        float(f.time.centers()[j]),
        float(rho),
        params=params.describe(),
    )


# ---------------------------------------------------------------------------
# mean oscillation


def ball_oscillation(values: np.ndarray, grid: GridSpec, radius: float) -> tuple[np.ndarray, np.ndarray]:
    """Mean oscillation ``(1/|B|) sum |f - f_B|`` of every clipped ball, and ``|B|`` in cells.

    ``values`` may carry leading batch axes.  The ball mean is the discrete
    average over the clipped ball.
    """
    values = np.asarray(values, dtype=np.float64)
    counts = ball_counts(grid, radius)
    mean = ball_sums(values, grid, radius) / counts
    lead = (slice(None),) * (values.ndim - grid.n)
    acc = np.zeros_like(values)
    for d in ball_offsets(grid, radius):
        dst, src = _shift_slices(d, grid.extent)
        acc[lead + dst] += np.abs(values[lead + src] - mean[lead + dst])
    return acc / counts, counts


def _oscillation_sup(f: SampledField, radii: RadiusSet) -> float:
    best = 0.0
    for r in radii:
        osc, _ = ball_oscillation(f.values, f.grid, r)
        best = max(best, float(np.max(osc)))
    return best


def bmo_seminorm(f: SampledField, radii=None) -> float:
    """Sup of mean oscillations over all clipped balls (max over slices for time fields)."""
    return _oscillation_sup(f, _radii(radii, f.grid))


def vmo_modulus(f: SampledField, r: float, radii=None) -> float:
    """Sup of mean oscillations over balls of radius at most ``r``."""
    if r < f.grid.h * (1 - 1e-12):
        raise RadiusTooSmallError(f"r={r} below grid spacing {f.grid.h}")
    return _oscillation_sup(f, _radii(radii, f.grid).up_to(r))
