"""Coefficient fields a_ij(x, t) of the nondivergence operator and their checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import IncompatibleFieldsError, InvalidCoefficientsError
from ..grid import GridSpec, RadiusSet, SampledField, TimeAxis
from ..norms import ball_oscillation

__all__ = [
    "CoefficientField",
    "CoefficientReport",
    "validate_coefficients",
    "register_coefficients",
    "coefficient_family",
    "coefficient_names",
]


@dataclass(frozen=True, eq=False)
class CoefficientField:
    """Matrix-valued samples ``a_ij`` at every cell center.

    ``values`` has shape ``extent + (d, d)`` when ``time`` is None (the
    coefficients do not depend on t) and ``(steps,) + extent + (d, d)``
    otherwise.  ``nu`` is the declared ellipticity constant.
    """

    grid: GridSpec
    values: np.ndarray
    nu: float
    time: TimeAxis | None = None
    name: str = "custom"

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        d = self.grid.n
        lead = () if self.time is None else (self.time.steps,)
        if v.shape != lead + self.grid.extent + (d, d):
            raise InvalidCoefficientsError(f"coefficient array has shape {v.shape}, expected {lead + self.grid.extent + (d, d)}")
        if not np.all(np.isfinite(v)):
            raise InvalidCoefficientsError("coefficients must be finite")
        if not (self.nu >= 1 and math.isfinite(self.nu)):
            raise InvalidCoefficientsError(f"ellipticity constant nu={self.nu} must be a finite number >= 1")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, fn: Callable, grid: GridSpec, nu: float, time: TimeAxis | None = None, name: str = "custom"):
        """Sample ``fn(x)`` (or ``fn(x, t)`` when ``time`` is given) returning ``(..., d, d)``."""
        x = grid.centers()
        if time is None:
            v = np.asarray(fn(x), dtype=np.float64)
        else:
            t = time.centers().reshape((-1,) + (1,) * grid.n)
            v = np.asarray(fn(x[None], t), dtype=np.float64)
        d = grid.n
        lead = () if time is None else (time.steps,)
        v = np.broadcast_to(v, lead + grid.extent + (d, d))
        return cls(grid, v, nu, time, name)

    @classmethod
    def constant(cls, matrix, grid: GridSpec, nu: float | None = None, name: str = "constant"):
        m = np.asarray(matrix, dtype=np.float64)
        if nu is None:
            ev = np.linalg.eigvalsh((m + m.T) / 2)
            nu = max(1.0, float(ev.max()), 1 / float(ev.min())) if ev.min() > 0 else 1.0
        return cls(grid, np.broadcast_to(m, grid.extent + m.shape), nu, None, name)

    @property
    def d(self) -> int:
        return self.grid.n

    @property
    def stationary(self) -> bool:
        return self.time is None

    @property
    def is_constant(self) -> bool:
        first = self.values.reshape(-1, self.d, self.d)[0]
        return bool(np.all(self.values == first))

    def matrix_at_cells(self, time: TimeAxis | None = None) -> np.ndarray:
        """Values broadcast against a space-time field on ``time``."""
        if self.time is None:
            if time is None:
                return self.values
            return np.broadcast_to(self.values, (time.steps,) + self.values.shape)
        if time is not None and time != self.time:
            raise IncompatibleFieldsError("coefficients and field live on different time axes")
        return self.values

    def entry(self, i: int, j: int) -> SampledField:
        return SampledField(self.grid, self.values[..., i, j], self.time)

    def sup_norm(self, i: int, j: int) -> float:
        return float(np.max(np.abs(self.values[..., i, j])))

    def check_compatible(self, grid: GridSpec, time: TimeAxis | None) -> None:
        if not self.grid.same_as(grid):
            raise IncompatibleFieldsError("coefficients and field live on different grids")
        if self.time is not None and self.time != time:
            raise IncompatibleFieldsError("coefficients and field live on different time axes")


@dataclass(frozen=True)
class CoefficientReport:
    symmetry_defect: float
    lower: float
    upper: float
    vmo: dict

    @property
    def nu(self) -> float:
        """Smallest nu with nu^-1 |xi|^2 <= a xi.xi <= nu |xi|^2 on the sampled directions."""
        return max(1.0, self.upper, 1.0 / self.lower)

    def rows(self) -> list[dict]:
        out = []
        for (i, j), table in sorted(self.vmo.items()):
            for r, eta in table:
                out.append({"i": i, "j": j, "radius": r, "eta": eta})
        return out


def _directions(d: int, samples: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    xi = rng.standard_normal((samples, d))
    xi = np.concatenate([np.eye(d), xi / np.linalg.norm(xi, axis=-1, keepdims=True)])
    return xi


def validate_coefficients(a: CoefficientField, radii=None, samples: int = 64, seed: int = 0) -> CoefficientReport:
    """Symmetry, sampled ellipticity and the VMO modulus table of every entry.

    Raises :class:`InvalidCoefficientsError` when ``a_ij != a_ji`` anywhere,
    when some sampled quadratic form is not positive, or when the empirical
    ellipticity constant exceeds the declared ``a.nu``.  The VMO modulus is
    taken slice by slice in space (max over time slices); ``eta(r)`` is the
    running max over the radii up to ``r``.
    """
    v = a.values
    defect = float(np.max(np.abs(v - np.swapaxes(v, -1, -2))))
    if defect > 0:
        raise InvalidCoefficientsError(f"coefficients are not symmetric (max |a_ij - a_ji| = {defect})")
    xi = _directions(a.d, samples, seed)
    flat = v.reshape(-1, a.d, a.d)
    lower, upper = math.inf, -math.inf
    for k in range(xi.shape[0]):
        q = np.einsum("cij,i,j->c", flat, xi[k], xi[k])
        lower, upper = min(lower, float(q.min())), max(upper, float(q.max()))
    if lower <= 0:
        raise InvalidCoefficientsError(f"coefficients are not elliptic (min a xi.xi = {lower})")
    report_nu = max(1.0, upper, 1.0 / lower)
    if report_nu > a.nu * (1 + 1e-12):
        raise InvalidCoefficientsError(f"sampled ellipticity constant {report_nu} exceeds the declared nu={a.nu}")
    if radii is None:
        radii = RadiusSet.dyadic(a.grid.h, max(a.grid.h, min(0.5, a.grid.diameter / 4)))
    elif not isinstance(radii, RadiusSet):
        radii = RadiusSet(tuple(radii))
    vmo = {}
    for i in range(a.d):
        for j in range(i, a.d):
            entry = v[..., i, j]
            running, table = 0.0, []
            for r in radii:
                if np.all(entry == entry.flat[0]):
                    osc = 0.0
                else:
                    osc = float(np.max(ball_oscillation(entry, a.grid, r)[0]))
                running = max(running, osc)
                table.append((float(r), running))
            vmo[i, j] = tuple(table)
    return CoefficientReport(defect, lower, upper, vmo)


# ---------------------------------------------------------------------------
# named families

_FAMILIES: dict[str, Callable] = {}


def register_coefficients(name: str, factory: Callable) -> None:
    """``factory(grid, time=None, **options) -> CoefficientField``."""
    _FAMILIES[name] = factory


def coefficient_family(name: str) -> Callable:
    try:
        return _FAMILIES[name]
    except KeyError:
        raise InvalidCoefficientsError(f"unknown coefficient family {name!r}; registered: {sorted(_FAMILIES)}") from None


def coefficient_names() -> list[str]:
    return sorted(_FAMILIES)


def _identity(grid, time=None):
    return CoefficientField.constant(np.eye(grid.n), grid, 1.0, "identity")


def _smooth_perturbation(grid, time=None, amplitude: float = 0.1):
    def fn(x):
        return (1 + amplitude * np.sin(x[..., 0]))[..., None, None] * np.eye(grid.n)

    nu = max(1 + amplitude, 1 / (1 - amplitude))
    return CoefficientField.from_function(fn, grid, nu, None, "smooth-perturbation")


def _mollified_jump(grid, time=None, width: float = 1 / 16, low: float = 1.0, high: float = 2.0):
    def fn(x):
        s = 0.5 * (1 + np.tanh(x[..., 0] / width))
        return (low + (high - low) * s)[..., None, None] * np.eye(grid.n)

    return CoefficientField.from_function(fn, grid, max(high, 1 / low), None, "mollified-jump")


register_coefficients("identity", _identity)
register_coefficients("smooth-perturbation", _smooth_perturbation)
register_coefficients("mollified-jump", _mollified_jump)
