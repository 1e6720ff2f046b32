"""Singular-integral kernels: descriptors, a name registry, and axiom checks.

A kernel acts on ``R^n`` (metric ``"euclidean"``) or on space-time
``R^n x R`` with time last (metric ``"parabolic"``).  Classical kernels map a
displacement ``z`` to a real; variable kernels also take a base point ``x``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import roots_jacobi

from ..errors import InvalidKernelError
from .metric import parabolic_dilation

__all__ = [
    "KernelDescriptor",
    "KernelReport",
    "register_kernel",
    "get_kernel",
    "kernel_names",
    "sphere_quadrature",
    "kernel_validate",
    "riesz_transform_kernel",
]


@dataclass(frozen=True)
class KernelDescriptor:
    """A kernel together with the data needed to check its axioms.

    ``degree`` is the homogeneity order under the metric's dilation.
    ``bounds`` maps a multi-index over the displacement coordinates to the
    declared bound ``c(beta)`` of the derivative on the unit sphere.
    """

    name: str
    kind: str
    metric: str
    n: int
    degree: float
    evaluate: Callable
    bounds: dict = field(default_factory=dict)
    sample_points: tuple = ()

    def __post_init__(self):
        if self.kind not in ("classical", "variable"):
            raise InvalidKernelError(f"kernel kind must be classical or variable, got {self.kind!r}")
        if self.metric not in ("euclidean", "parabolic"):
            raise InvalidKernelError(f"kernel metric must be euclidean or parabolic, got {self.metric!r}")

    @property
    def dim(self) -> int:
        return self.n + (1 if self.metric == "parabolic" else 0)

    def __call__(self, z, x=None):
        z = np.asarray(z, dtype=np.float64)
        if self.kind == "variable":
            if x is None:
                raise InvalidKernelError(f"variable kernel {self.name!r} needs a base point")
            return self.evaluate(np.asarray(x, dtype=np.float64), z)
        return self.evaluate(z)

    def dilate(self, z, s: float) -> np.ndarray:
        if self.metric == "parabolic":
            return parabolic_dilation(z, s)
        return np.asarray(z, dtype=np.float64) * s

    def base_points(self) -> list:
        if self.kind == "classical":
            return [None]
        return [np.asarray(p, dtype=np.float64) for p in self.sample_points] or [np.zeros(self.dim)]


_REGISTRY: dict[str, Callable[[], KernelDescriptor]] = {}


def register_kernel(name: str, factory: Callable[[], KernelDescriptor]) -> None:
    _REGISTRY[name] = factory


def get_kernel(name: str) -> KernelDescriptor:
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise InvalidKernelError(f"unknown kernel {name!r}; registered: {sorted(_REGISTRY)}") from None
    return factory()


def kernel_names() -> list[str]:
    return sorted(_REGISTRY)


# ---------------------------------------------------------------------------
# quadrature on the unit sphere of R^d


@lru_cache(maxsize=32)
def sphere_quadrature(d: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes (m, d) and weights (m,) integrating over the unit sphere S^(d-1).

    d = 1: the two points +-1.  d = 2: ``2 * order`` equally spaced angles
    (offset by half a step so the node set is symmetric under every
    coordinate reflection).  d >= 3: Gauss-Jacobi in the last coordinate
    times a rule on S^(d-2), recursively.
    """
    if d < 1 or order < 1:
        raise InvalidKernelError("sphere quadrature needs d >= 1 and order >= 1")
    if d == 1:
        nodes, weights = np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    elif d == 2:
        m = 2 * order
        th = (np.arange(m) + 0.5) * (2 * math.pi / m)
        nodes = np.stack([np.cos(th), np.sin(th)], axis=-1)
        weights = np.full(m, 2 * math.pi / m)
    else:
        a = (d - 3) / 2
        s, ws = roots_jacobi(order, a, a)
        sub, wsub = sphere_quadrature(d - 1, order)
        c = np.sqrt(1 - s * s)
        nodes = np.concatenate([np.column_stack([ci * sub, np.full(len(sub), si)]) for si, ci in zip(s, c)])
        weights = np.concatenate([wi * wsub for wi in ws])
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class KernelReport:
    name: str
    zero_mean_defect: float
    abs_integral: float
    homogeneity_defect: float
    derivative_checks: dict
    zero_mean_tol: float
    homogeneity_tol: float

    @property
    def zero_mean_ok(self) -> bool:
        return self.zero_mean_defect < self.zero_mean_tol

    @property
    def homogeneity_ok(self) -> bool:
        return self.homogeneity_defect < self.homogeneity_tol

    @property
    def derivatives_ok(self) -> bool:
        return all(v <= c for v, c in self.derivative_checks.values())

    @property
    def passed(self) -> bool:
        return self.zero_mean_ok and self.homogeneity_ok and self.derivatives_ok and math.isfinite(self.abs_integral)

    def rows(self) -> list[dict]:
        out = [
            {"check": "zero-mean", "value": self.zero_mean_defect, "bound": self.zero_mean_tol, "pass": self.zero_mean_ok},
            {"check": "abs-integral", "value": self.abs_integral, "bound": math.inf, "pass": math.isfinite(self.abs_integral)},
            {"check": "homogeneity", "value": self.homogeneity_defect, "bound": self.homogeneity_tol, "pass": self.homogeneity_ok},
        ]
        for beta, (v, c) in sorted(self.derivative_checks.items()):
            out.append({"check": "derivative" + "".join(map(str, beta)), "value": v, "bound": c, "pass": v <= c})
        return out


def _fd_derivative(fn, z: np.ndarray, beta: tuple, step: float) -> np.ndarray:
    """Centered finite difference of ``fn`` at the rows of ``z`` for a multi-index of order <= 2."""
    axes = [i for i, b in enumerate(beta) for _ in range(b)]
    if not axes:
        return fn(z)
    e = np.eye(z.shape[-1]) * step
    if len(axes) == 1:
        i = axes[0]
        return (fn(z + e[i]) - fn(z - e[i])) / (2 * step)
    if len(axes) == 2:
        i, j = axes
        if i == j:
            return (fn(z + e[i]) - 2 * fn(z) + fn(z - e[i])) / step**2
        return (fn(z + e[i] + e[j]) - fn(z + e[i] - e[j]) - fn(z - e[i] + e[j]) + fn(z - e[i] - e[j])) / (4 * step**2)
    raise InvalidKernelError("derivative checks support multi-indices of order at most 2")


def kernel_validate(
    k: KernelDescriptor,
    order: int = 64,
    scales=(0.5, 2.0, 4.0),
    fd_step: float = 1e-4,
    zero_mean_tol: float = 1e-8,
    homogeneity_tol: float = 1e-10,
) -> KernelReport:
    """Check zero mean, homogeneity and (when declared) derivative bounds on the unit sphere.

    The unit sphere of the parabolic metric coincides with the Euclidean one,
    so a single quadrature serves both metrics.  ``zero_mean_defect`` is
    ``|integral of k|`` and the homogeneity defect is the max of
    ``|k(delta_s z) - s^degree k(z)|`` relative to ``s^degree max|k|``.
    """
    nodes, weights = sphere_quadrature(k.dim, order)
    zero, absint, homog = 0.0, 0.0, 0.0
    checks: dict = {}
    for x in k.base_points():
        fn = (lambda z: k(z)) if x is None else (lambda z, x=x: k(z, x))
        vals = np.asarray(fn(nodes), dtype=np.float64)
        if not np.all(np.isfinite(vals)):
            raise InvalidKernelError(f"kernel {k.name!r} is not finite on the unit sphere")
        zero = max(zero, abs(float(np.dot(weights, vals))))
        absint = max(absint, float(np.dot(weights, np.abs(vals))))
        top = float(np.max(np.abs(vals)))
        if top > 0:
            for s in scales:
                scaled = np.asarray(fn(k.dilate(nodes, s)), dtype=np.float64)
                homog = max(homog, float(np.max(np.abs(scaled - s**k.degree * vals))) / (s**k.degree * top))
        for beta, c in k.bounds.items():
            v = float(np.max(np.abs(_fd_derivative(fn, np.array(nodes), tuple(beta), fd_step))))
            prev = checks.get(tuple(beta), (0.0, c))[0]
            checks[tuple(beta)] = (max(prev, v), float(c))
    return KernelReport(k.name, zero, absint, homog, checks, zero_mean_tol, homogeneity_tol)


def multi_indices(dim: int, max_order: int = 2):
    for order in range(max_order + 1):
        for combo in itertools.combinations_with_replacement(range(dim), order):
            beta = [0] * dim
            for i in combo:
                beta[i] += 1
            yield tuple(beta)


# ---------------------------------------------------------------------------
# shipped kernels


def riesz_transform_kernel(n: int, j: int = 0) -> KernelDescriptor:
    """z_j / |z|^(n+1), odd and homogeneous of degree -n."""

    def ev(z):
        r = np.sqrt(np.sum(z * z, axis=-1))
        with np.errstate(divide="ignore", invalid="ignore"):
            return z[..., j] / r ** (n + 1)

    name = "riesz-transform" if n == 2 and j == 0 else f"riesz-transform-{n}d"
    return KernelDescriptor(name, "classical", "euclidean", n, -float(n), ev)


def _abs_power(n: int = 2) -> KernelDescriptor:
    def ev(z):
        with np.errstate(divide="ignore"):
            return np.sum(z * z, axis=-1) ** (-n / 2)

    return KernelDescriptor("abs-power", "classical", "euclidean", n, -float(n), ev)


def _heat_gamma(i: int = 0, j: int = 1, n: int = 2):
    from ..parabolic.fundamental import FundamentalSolutionParams, gamma_second_derivatives

    params = FundamentalSolutionParams.identity(n)

    def ev(z):
        return gamma_second_derivatives(params, z[..., :n], z[..., n])[..., i, j]

    return KernelDescriptor("heat-gamma-12", "classical", "parabolic", n, params.second_derivative_degree, ev)


def smooth_perturbation_matrix(x, n: int = 2, amplitude: float = 0.1) -> np.ndarray:
    """a_ij(x) = delta_ij (1 + amplitude sin x_1)."""
    x = np.asarray(x, dtype=np.float64)
    return (1 + amplitude * np.sin(x[..., 0]))[..., None, None] * np.eye(n)


def _heat_gamma_variable(n: int = 2):
    from ..parabolic.fundamental import prefactor_exponent

    e = prefactor_exponent(n, "printed")

    def ev(x, z):
        # a(x) = c(x) I, so A = I / c and det a = c^n
        c = 1 + 0.1 * np.sin(x[..., 0])
        zeta, tau = z[..., :n], z[..., n]
        pos = tau > 0
        ts = np.where(pos, tau, 1.0)
        g = (4 * math.pi * ts) ** e * c ** (-n / 2) * np.exp(-np.sum(zeta * zeta, axis=-1) / (4 * ts * c))
        val = g * zeta[..., 0] * zeta[..., 1] / (4 * ts * ts * c * c)
        return np.where(pos, val, 0.0)

    # declared c(beta) on the unit sphere, uniform over c(x) in [0.9, 1.1];
    # keyed by (order in space, order in time) plus whether the spatial part is mixed
    table = {(0, 0, False): 1.5, (1, 0, False): 6.0, (0, 1, False): 45.0, (2, 0, False): 35.0,
             (2, 0, True): 25.0, (1, 1, False): 260.0, (0, 2, False): 2800.0}
    bounds = {}
    for beta in multi_indices(n + 1, 2):
        sp = beta[:n]
        bounds[beta] = table[(sum(sp), beta[n], sum(1 for b in sp if b) > 1)]
    pts = tuple((math.pi / 2 * s, 0.0, 0.0) for s in (-1.0, 0.0, 1.0))
    return KernelDescriptor("heat-gamma-12-variable", "variable", "parabolic", n, 2 * e - 2, ev, bounds, pts)


register_kernel("riesz-transform", lambda: riesz_transform_kernel(2))
register_kernel("riesz-transform-1d", lambda: riesz_transform_kernel(1))
register_kernel("abs-power", _abs_power)
register_kernel("heat-gamma-12", _heat_gamma)
register_kernel("heat-gamma-12-variable", _heat_gamma_variable)
