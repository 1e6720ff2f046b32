"""Seeded test-function corpora.

Functions are continuous expressions fixed at construction and only sampled
when a grid is given, so the same corpus can be evaluated at several
resolutions.  Every function is compactly supported inside the box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import InvalidCorpusError
from ..grid import GridSpec, SampledField, TimeAxis, sample

__all__ = ["SPATIAL_GENERATORS", "TEMPORAL_GENERATORS", "CorpusSpec", "CorpusFunction", "build_corpus", "sample_corpus", "bump_profile"]

SPATIAL_GENERATORS = ("bump", "indicator", "tensor", "trig", "near-extremal")
TEMPORAL_GENERATORS = ("smooth", "window", "near-extremal", "moving")


def bump_profile(s):
    """C^infinity bump on [0, 1): exp(1 - 1/(1 - s^2)), equal to 1 at s = 0."""
    s = np.asarray(s, dtype=np.float64)
    inside = np.abs(s) < 1
    safe = np.where(inside, 1 - s * s, 1.0)
    return np.where(inside, np.exp(1 - 1 / safe), 0.0)


@dataclass(frozen=True)
class CorpusSpec:
    """What to generate.

    ``p`` and ``lam`` shape the spatial near-extremal profile
    ``|x - c|^((lam - n)/p)``; ``q`` and ``mu`` the temporal one.
    ``lam=None`` means ``n/2``.
    """

    generators: tuple = SPATIAL_GENERATORS
    count: int = 20
    seed: int = 0
    p: float = 2.0
    lam: float | None = None
    q: float = 2.0
    mu: float = 0.5
    temporal: tuple = TEMPORAL_GENERATORS

    def __post_init__(self):
        if self.count < 1 or not self.generators:
            raise InvalidCorpusError("corpus must request at least one function from at least one generator")
        for g in self.generators:
            if g not in SPATIAL_GENERATORS:
                raise InvalidCorpusError(f"unknown spatial generator {g!r}")
        for g in self.temporal:
            if g not in TEMPORAL_GENERATORS:
                raise InvalidCorpusError(f"unknown temporal generator {g!r}")


@dataclass(frozen=True)
class CorpusFunction:
    function_id: str
    kind: str
    expr: Callable
    timed: bool

    def sample(self, grid: GridSpec, time: TimeAxis | None = None) -> SampledField:
        if self.timed and time is None:
            raise InvalidCorpusError(f"{self.function_id} needs a time axis")
        if time is None:
            return sample(self.expr, grid)
        if self.timed:
            return sample(self.expr, grid, time)
        expr = self.expr
        return sample(lambda x, t: expr(x) * np.ones_like(t), grid, time)


def _spatial(kind, rng, n, mid, half, p, lam):
    c = mid + rng.uniform(-0.3, 0.3, n) * half
    r = float(rng.uniform(0.2, 0.5) * np.min(half))
    amp = float(rng.uniform(0.5, 2.0))
    if kind == "bump":
        return lambda x: amp * bump_profile(np.linalg.norm(x - c, axis=-1) / r)
    if kind == "indicator":
        if rng.random() < 0.5:
            return lambda x: amp * (np.linalg.norm(x - c, axis=-1) < r).astype(float)
        return lambda x: amp * np.all(np.abs(x - c) < r / math.sqrt(n), axis=-1).astype(float)
    if kind == "tensor":
        radii = rng.uniform(0.4, 1.0, n) * r
        return lambda x: amp * np.prod(bump_profile((x - c) / radii), axis=-1)
    if kind == "trig":
        freqs = rng.integers(-4, 5, (3, n)) * (math.pi / r)
        phases = rng.uniform(0, 2 * math.pi, 3)
        weights = rng.uniform(-1, 1, 3)

        def trig(x):
            waves = sum(w * np.cos(x @ k + ph) for w, k, ph in zip(weights, freqs, phases))
            return amp * (0.5 + waves) * bump_profile(np.linalg.norm(x - c, axis=-1) / r)

        return trig
    if kind == "near-extremal":
        delta = r / 16
        e = (lam - n) / p
        return lambda x: amp * np.maximum(np.linalg.norm(x - c, axis=-1), delta) ** e * bump_profile(
            np.linalg.norm(x - c, axis=-1) / r
        )
    raise InvalidCorpusError(f"unknown spatial generator {kind!r}")


def _temporal(kind, rng, T, q, mu):
    tc = float(rng.uniform(0.3, 0.7) * T)
    w = float(rng.uniform(0.15, 0.3) * T)
    if kind in ("smooth", "moving"):
        return lambda t: bump_profile((t - tc) / w)
    if kind == "window":
        return lambda t: (np.abs(t - tc) < w).astype(float)
    if kind == "near-extremal":
        delta = w / 16
        e = (mu - 1) / q
        return lambda t: np.maximum(np.abs(t - tc), delta) ** e * bump_profile((t - tc) / w)
    raise InvalidCorpusError(f"unknown temporal generator {kind!r}")


def build_corpus(spec: CorpusSpec, n: int, box, T: float | None = None) -> list[CorpusFunction]:
    """Draw ``spec.count`` functions for the box ``(lower, upper)``.

    With ``T`` given the functions are space-time: a spatial profile times a
    temporal factor, or (``moving``) a profile whose center drifts in time.
    Generators are cycled in order; all randomness comes from ``spec.seed``.
    """
    lower, upper = (np.broadcast_to(np.asarray(b, dtype=np.float64), (n,)) for b in box)
    mid, half = (lower + upper) / 2, (upper - lower) / 2
    lam = n / 2 if spec.lam is None else spec.lam
    rng = np.random.default_rng(spec.seed)
    out = []
    for i in range(spec.count):
        kind = spec.generators[i % len(spec.generators)]
        fx = _spatial(kind, rng, n, mid, half, spec.p, lam)
        if T is None:
            out.append(CorpusFunction(f"{i:03d}-{kind}", kind, fx, False))
            continue
        tkind = spec.temporal[(i // len(spec.generators) + i) % len(spec.temporal)]
        ft = _temporal(tkind, rng, T, spec.q, spec.mu)
        if tkind == "moving":
            v = rng.uniform(-1, 1, n) * 0.15 * half / T
            expr = lambda x, t, fx=fx, ft=ft, v=v: fx(x - v * (t[..., None] - T / 2)) * ft(t)
        else:
            expr = lambda x, t, fx=fx, ft=ft: fx(x) * ft(t)
        out.append(CorpusFunction(f"{i:03d}-{kind}-{tkind}", f"{kind}/{tkind}", expr, True))
    return out


def sample_corpus(functions, grid: GridSpec, time: TimeAxis | None = None) -> list[tuple[str, SampledField]]:
    """Sample every function and check it is finite and vanishes on the outer cell layer."""
    if not functions:
        raise InvalidCorpusError("corpus is empty")
    out = []
    for fn in functions:
        f = fn.sample(grid, time)
        v = f.values
        lead = v.ndim - grid.n
        for ax in range(grid.n):
            edge = np.take(v, [0, grid.extent[ax] - 1], axis=lead + ax)
            if np.any(edge != 0):
                raise InvalidCorpusError(f"{fn.function_id} is not compactly supported inside the box")
        out.append((fn.function_id, f))
    return out
