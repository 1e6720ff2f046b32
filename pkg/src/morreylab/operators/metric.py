"""Parabolic quasi-distance on space-time R^n x R."""

from __future__ import annotations

import numpy as np

__all__ = ["parabolic_distance", "parabolic_dilation", "quasi_triangle_constant"]


def parabolic_distance(x) -> np.ndarray | float:
    """rho(x', t) = sqrt((|x'|^2 + sqrt(|x'|^4 + 4 t^2)) / 2); time is the last coordinate.

    The level set rho = 1 is the Euclidean unit sphere, and
    rho(s x', s^2 t) = s rho(x', t).
    """
    x = np.asarray(x, dtype=np.float64)
    # evaluate at the parabolically rescaled point so |x'|^4 cannot under/overflow
    m = np.maximum(np.max(np.abs(x[..., :-1]), axis=-1, initial=0.0), np.sqrt(np.abs(x[..., -1])))
    safe = np.where(m > 0, m, 1.0)
    s = np.sum((x[..., :-1] / safe[..., None]) ** 2, axis=-1)
    t = x[..., -1] / safe / safe
    out = m * np.sqrt((s + np.sqrt(s * s + 4.0 * t * t)) / 2.0)
    return float(out) if out.ndim == 0 else out


def parabolic_dilation(x, s: float) -> np.ndarray:
    x = np.array(x, dtype=np.float64)
    x[..., :-1] *= s
    x[..., -1] *= s * s
    return x


def quasi_triangle_constant(n: int, count: int = 1000, seed: int = 0, scale: float = 1.0) -> float:
    """Empirical max of rho(x+y) / (rho(x) + rho(y)) over random pairs in R^(n+1)."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((count, n + 1)) * scale
    y = rng.standard_normal((count, n + 1)) * scale
    return float(np.max(parabolic_distance(x + y) / (parabolic_distance(x) + parabolic_distance(y))))
