"""Independent brute-force evaluators used as test oracles.

Nothing here calls the package's fast paths: every region is built from an
explicit distance test over all cell centers and summed cell by cell.
"""

import math

import numpy as np


def centers(origin, h, extent):
    axes = [o + (np.arange(e) + 0.5) * h for o, e in zip(origin, extent)]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)


def ball_mask(C, x, r):
    return np.sum((C - x) ** 2, axis=-1) < r * r * (1 - 1e-10)


def morrey_pth_power(values, origin, h, p, lam, radii):
    """sup over all centers and radii of r^-lam * sum |f|^p h^n (explicit loops)."""
    extent = values.shape
    n = len(extent)
    C = centers(origin, h, extent)
    a = np.abs(values) ** p
    best = 0.0
    for idx in np.ndindex(*extent):
        for r in radii:
            s = 0.0
            m = ball_mask(C, C[idx], r)
            for j in zip(*np.nonzero(m)):
                s += a[j]
            best = max(best, s * h**n / r**lam)
    return best


def morrey(values, origin, h, p, lam, radii):
    return morrey_pth_power(values, origin, h, p, lam, radii) ** (1 / p)


def mixed_morrey(values, origin, h, dt, q, mu, p, lam, radii, time_radii):
    steps = values.shape[0]
    S = [morrey_pth_power(values[k], origin, h, p, lam, radii) for k in range(steps)]
    t = (np.arange(steps) + 0.5) * dt
    best = 0.0
    for t0 in t:
        for rho in time_radii:
            s = 0.0
            for k in range(steps):
                if abs(t[k] - t0) < rho * (1 - 1e-12):
                    s += S[k] ** (q / p) * dt
            best = max(best, s / rho**mu)
    return best ** (1 / q)


def mean_oscillations(values, origin, h, radii):
    """Dict (center index, r) -> mean oscillation over the clipped ball."""
    C = centers(origin, h, values.shape)
    out = {}
    for idx in np.ndindex(*values.shape):
        for r in radii:
            m = ball_mask(C, C[idx], r)
            vals = values[m]
            out[idx, r] = float(np.mean(np.abs(vals - vals.mean())))
    return out


def hl_maximal(values, origin, h, radii):
    C = centers(origin, h, values.shape)
    out = np.zeros(values.shape)
    for idx in np.ndindex(*values.shape):
        out[idx] = max(np.abs(values[ball_mask(C, C[idx], r)]).mean() for r in radii)
    return out


def lens_area(r1, r2, d):
    """Area of the intersection of discs of radii r1, r2 at center distance d."""
    if d >= r1 + r2:
        return 0.0
    if d <= abs(r1 - r2):
        return math.pi * min(r1, r2) ** 2
    c1 = min(1.0, max(-1.0, (d * d + r1 * r1 - r2 * r2) / (2 * d * r1)))
    c2 = min(1.0, max(-1.0, (d * d + r2 * r2 - r1 * r1) / (2 * d * r2)))
    a3 = 0.5 * math.sqrt(max(0.0, (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)))
    a1 = r1 * r1 * math.acos(c1)
    a2 = r2 * r2 * math.acos(c2)
    return a1 + a2 - a3


def containing_ball_sup(values, origin, h, radii, stat):
    """sup over grid balls B_r(c) containing each cell of stat(values inside the ball)."""
    C = centers(origin, h, values.shape)
    out = np.zeros(values.shape)
    for r in radii:
        for c in np.ndindex(*values.shape):
            m = ball_mask(C, C[c], r)
            s = stat(values[m], int(m.sum()))
            out[m] = np.maximum(out[m], s)
    return out


def riesz_at(values, origin, h, alpha, index, self_cell):
    """Direct sum of f(y)|x-y|^(alpha-n) h^n at one cell, self cell given separately."""
    n = values.ndim
    C = centers(origin, h, values.shape)
    x = C[index]
    total = 0.0
    for j in zip(*np.nonzero(values)):
        if j == tuple(index):
            total += values[j] * self_cell
        else:
            total += values[j] * math.dist(C[j], x) ** (alpha - n) * h**n
    return total
