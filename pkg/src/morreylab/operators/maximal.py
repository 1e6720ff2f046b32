"""Hardy-Littlewood, sharp and fractional maximal functions on the grid.

Every operator accepts a spatial field or a space-time field; the latter is
processed slice by slice.  Ball averages are taken over the ball clipped to
the box, divided by the number of cells actually inside.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._validation import check_field
from ..errors import InvalidExponentError
from ..grid import RadiusSet, SampledField, ball_counts, ball_max_filter, ball_sums
from ..norms import ball_oscillation

__all__ = ["MaximalParams", "hl_maximal", "sharp_maximal", "fractional_maximal", "uncentered_maximal"]

VARIANTS = ("hardy-littlewood", "sharp", "fractional")


@dataclass(frozen=True)
class MaximalParams:
    """Which maximal function to apply.

    ``oscillation`` only matters for the fractional variant: when set the
    integrand is ``|f - f_B|``, otherwise ``|f|``.  ``relaxed`` admits
    ``eta = 0``.
    """

    variant: str = "hardy-littlewood"
    eta: float | None = None
    oscillation: bool = True
    relaxed: bool = False

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise InvalidExponentError(f"unknown maximal variant {self.variant!r}")
        if self.variant == "fractional":
            eta = self.eta
            lo_ok = eta is not None and (eta >= 0 if self.relaxed else eta > 0)
            if not (lo_ok and eta < 1):
                raise InvalidExponentError(f"fractional maximal needs 0 < eta < 1, got {eta}")


def _radii(f: SampledField, radii) -> RadiusSet:
    if radii is None:
        return RadiusSet.for_grid(f.grid)
    return radii if isinstance(radii, RadiusSet) else RadiusSet(tuple(radii))


def hl_maximal(f: SampledField, radii=None) -> SampledField:
    """Centered maximal function: max over radii of the clipped-ball mean of |f|."""
    check_field(f)
    a = np.abs(f.values)
    out = np.zeros_like(a)
    for r in _radii(f, radii):
        np.maximum(out, ball_sums(a, f.grid, r) / ball_counts(f.grid, r), out=out)
    return f.with_values(out)


def _sup_containing(stat_for_radius, f: SampledField, radii) -> SampledField:
    """Sup over balls B_r(c) with x in B_r(c) of a per-ball statistic."""
    out = np.zeros(f.values.shape)
    for r in _radii(f, radii):
        np.maximum(out, ball_max_filter(stat_for_radius(r), f.grid, r), out=out)
    return f.with_values(out)


def uncentered_maximal(f: SampledField, radii=None) -> SampledField:
    """Sup of |f| averages over all grid balls that contain the point."""
    check_field(f)
    a = np.abs(f.values)
    return _sup_containing(lambda r: ball_sums(a, f.grid, r) / ball_counts(f.grid, r), f, radii)


def sharp_maximal(f: SampledField, radii=None) -> SampledField:
    """Sup of mean oscillations over grid balls containing the point."""
    check_field(f)
    return _sup_containing(lambda r: ball_oscillation(f.values, f.grid, r)[0], f, radii)


def fractional_maximal(f: SampledField, params: MaximalParams | float, radii=None) -> SampledField:
    """Sup over balls containing x of ``|B|^(eta-1) * integral_B g``.

    ``g = |f - f_B|`` with the oscillation flag, ``g = |f|`` without it.
    """
    check_field(f)
    if not isinstance(params, MaximalParams):
        params = MaximalParams("fractional", float(params))
    if params.variant != "fractional":
        raise InvalidExponentError("fractional_maximal needs the fractional variant")
    grid, eta = f.grid, float(params.eta)
    a = np.abs(f.values)

    def stat(r):
        counts = ball_counts(grid, r)
        if params.oscillation:
            osc, _ = ball_oscillation(f.values, grid, r)
            integral = osc * counts * grid.cell_volume
        else:
            integral = ball_sums(a, grid, r) * grid.cell_volume
        return (counts * grid.cell_volume) ** (eta - 1.0) * integral

    return _sup_containing(stat, f, radii)
