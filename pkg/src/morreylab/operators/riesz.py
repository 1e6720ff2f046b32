"""Riesz potential (fractional integral) by direct lattice summation."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .._validation import check_field, check_open_interval
from ..grid import GridSpec, SampledField
from ._convolve import convolve_table

__all__ = ["riesz_potential", "riesz_table", "self_cell_integral"]


@lru_cache(maxsize=64)
def _unit_cell_constant(n: int, alpha: float, nodes: int = 48) -> float:
    """Integral of |z|^(alpha-n) over the unit cube [-1/2, 1/2]^n.

    The cube splits into 2n pyramids with apex at the origin; integrating the
    radial variable in closed form leaves a smooth integral over one face,
    done with tensor Gauss-Legendre.
    """
    if n == 1:
        return 2.0 * 0.5**alpha / alpha
    x, w = np.polynomial.legendre.leggauss(nodes)
    x, w = 0.5 * x, 0.5 * w
    grids = np.meshgrid(*([x] * (n - 1)), indexing="ij")
    weights = np.prod(np.meshgrid(*([w] * (n - 1)), indexing="ij"), axis=0)
    r2 = 0.25 + sum(g * g for g in grids)
    face = float(np.sum(weights * r2 ** ((alpha - n) / 2)))
    return n / alpha * face


def self_cell_integral(grid: GridSpec, alpha: float) -> float:
    """Integral of |y|^(alpha-n) over one cell centered at the singularity."""
    return grid.h**alpha * _unit_cell_constant(grid.n, float(alpha))


def riesz_table(grid: GridSpec, alpha: float) -> np.ndarray:
    """Weights ``|d h|^(alpha-n) h^n`` for every offset, self cell integrated exactly."""
    n = grid.n
    axes = [np.arange(-(e - 1), e) for e in grid.extent]
    d2 = sum(a.astype(np.float64) ** 2 for a in np.meshgrid(*axes, indexing="ij"))
    with np.errstate(divide="ignore"):
        table = (np.sqrt(d2) * grid.h) ** (alpha - n) * grid.cell_volume
    table[tuple(e - 1 for e in grid.extent)] = self_cell_integral(grid, alpha)
    return table


def riesz_potential(f: SampledField, alpha: float, method: str = "direct") -> SampledField:
    """``(I_alpha f)(x) = sum_y f(y) |x-y|^(alpha-n) h^n`` over the whole grid.

    ``method="fft"`` evaluates the same discrete sum by FFT convolution.
    """
    check_field(f)
    alpha = check_open_interval(alpha, 0.0, f.grid.n, "alpha")
    table = riesz_table(f.grid, alpha)
    return f.with_values(convolve_table(f.values, table, f.grid.n, method))
