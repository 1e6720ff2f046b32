"""Empirical checks of embeddings and operator bounds over corpora.

Each check evaluates both sides of an inequality for every corpus function
at every resolution of a :class:`Discretization` and collects the ratios in
a :class:`RatioReport`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import InvalidCorpusError, InvalidFieldError, UnknownOperatorError
from ..grid import SampledField, TimeAxis, build_grid, sample
from ..norms import MixedParams, MorreyParams, bmo_seminorm, mixed_morrey_norm, morrey_norm, spatial_morrey_profile
from ..operators import (
    MaximalParams,
    commutator,
    fractional_maximal,
    hl_maximal,
    riesz_potential,
    sharp_maximal,
    truncated_singular_integral,
)
from .corpus import CorpusFunction, sample_corpus
from .reports import RatioReport

__all__ = [
    "Discretization",
    "RatioOperator",
    "register_operator",
    "get_operator",
    "operator_names",
    "multiplier",
    "field_norm",
    "verify_embedding",
    "verify_operator_bound",
    "commutator_small_ball",
]


@dataclass(frozen=True)
class Discretization:
    """Grid family: one box, several resolutions, optional matching time steps."""

    n: int
    box: tuple
    resolutions: tuple
    steps: tuple | None = None
    T: float = 1.0

    def __post_init__(self):
        if self.steps is not None and len(self.steps) != len(self.resolutions):
            raise InvalidFieldError("steps must list one entry per resolution")

    def levels(self):
        for i, res in enumerate(self.resolutions):
            grid = build_grid(self.n, self.box, int(res))
            time = None if self.steps is None else TimeAxis(self.T, int(self.steps[i]))
            yield int(res), grid, time


def field_norm(f: SampledField, params, mask=None) -> float:
    """Morrey norm of a spatial field or mixed norm of a space-time field."""
    if isinstance(params, MixedParams):
        if f.time is None:
            raise InvalidFieldError("mixed norm needs a field with a time axis")
        return mixed_morrey_norm(f, params, mask=mask).value
    if isinstance(params, MorreyParams):
        if f.time is not None:
            raise InvalidFieldError("a Morrey norm applies to spatial fields; use MixedParams")
        return morrey_norm(f, params, mask=mask).value
    raise InvalidFieldError(f"unsupported norm parameters {params!r}")


def _exponents(source, target) -> dict:
    def flat(prefix, params):
        if isinstance(params, MixedParams):
            return {f"{prefix}_q": params.q, f"{prefix}_mu": params.mu, f"{prefix}_p": params.spatial.p, f"{prefix}_lam": params.spatial.lam}
        return {f"{prefix}_p": params.p, f"{prefix}_lam": params.lam}

    return {**flat("source", source), **flat("target", target)}


def verify_embedding(
    corpus: list[CorpusFunction],
    source,
    target,
    disc: Discretization,
    theorem_id: str = "embedding",
    drift_factor: float = 1.25,
) -> RatioReport:
    """Ratios ``||f||_target / ||f||_source`` for every corpus function and resolution."""
    if not corpus:
        raise InvalidCorpusError("corpus is empty")
    report = RatioReport(theorem_id, _exponents(source, target), drift_factor=drift_factor)
    shared = isinstance(source, MixedParams) and isinstance(target, MixedParams) and source.spatial == target.spatial
    for res, grid, time in disc.levels():
        for fid, f in sample_corpus(corpus, grid, time):
            if shared:
                prof = spatial_morrey_profile(f, source.spatial)
                lhs = mixed_morrey_norm(f, target, profile=prof).value
                rhs = mixed_morrey_norm(f, source, profile=prof).value
            else:
                lhs, rhs = field_norm(f, target), field_norm(f, source)
            report.add(fid, res, lhs, rhs, time.steps if time else None)
    return report


# ---------------------------------------------------------------------------
# operators with a ratio protocol


def multiplier(spec, n: int) -> Callable:
    """Multiplier functions ``a(x)`` for commutators, by name or as a callable."""
    if callable(spec):
        return spec
    name, _, arg = str(spec).partition(":")
    if name == "constant":
        c = float(arg or 2.0)
        return lambda x: np.full(x.shape[:-1], c)
    if name == "mollified-jump":
        width = float(arg or 1 / 16)
        return lambda x: np.tanh(x[..., 0] / width)
    if name == "smooth":
        return lambda x: np.sin(np.pi * x[..., 0])
    raise UnknownOperatorError(f"unknown multiplier {spec!r}")


def sample_multiplier(spec, f: SampledField) -> SampledField:
    a = sample(multiplier(spec, f.grid.n), f.grid)
    if f.time is None:
        return a
    return SampledField(f.grid, np.broadcast_to(a.values, f.values.shape), f.time)


@dataclass(frozen=True)
class RatioOperator:
    """``lhs = ||apply(f)||_target``; ``rhs = denominator(f, source)`` (default ``||f||_source``)."""

    name: str
    apply: Callable
    denominator: Callable | None = None
    defaults: dict = field(default_factory=dict)


_OPERATORS: dict[str, RatioOperator] = {}


def register_operator(op: RatioOperator) -> None:
    _OPERATORS[op.name] = op


def get_operator(name: str) -> RatioOperator:
    try:
        return _OPERATORS[name]
    except KeyError:
        raise UnknownOperatorError(f"unknown operator {name!r}; registered: {sorted(_OPERATORS)}") from None


def operator_names() -> list[str]:
    return sorted(_OPERATORS)


def _radii(f, p):
    # a callable policy builds the radius set for the field's own grid
    r = p.get("radii")
    return r(f) if callable(r) else r


register_operator(RatioOperator("identity", lambda f, p: f))
register_operator(RatioOperator("hl-maximal", lambda f, p: hl_maximal(f, _radii(f, p))))
register_operator(RatioOperator("sharp-maximal", lambda f, p: sharp_maximal(f, _radii(f, p))))
register_operator(
    RatioOperator(
        "fefferman-stein",
        lambda f, p: hl_maximal(f, _radii(f, p)),
        lambda f, src, p: field_norm(sharp_maximal(f, _radii(f, p)), src),
    )
)
register_operator(
    RatioOperator(
        "fractional-maximal",
        lambda f, p: fractional_maximal(f, MaximalParams("fractional", p["eta"], p.get("oscillation", True)), _radii(f, p)),
        defaults={"oscillation": True},
    )
)
register_operator(RatioOperator("riesz", lambda f, p: riesz_potential(f, p["alpha"], p.get("method", "fft"))))
register_operator(
    RatioOperator(
        "singular-integral",
        lambda f, p: truncated_singular_integral(f, p.get("kernel", "riesz-transform"), p["epsilon"], p.get("method", "fft")),
    )
)
register_operator(
    RatioOperator(
        "commutator",
        lambda f, p: commutator(sample_multiplier(p["a"], f), f, p.get("kernel", "riesz-transform"), p["epsilon"], p.get("method", "fft")),
    )
)


def _bmo_denominator(f, src, p):
    a = sample(multiplier(p["a"], f.grid.n), f.grid)
    return bmo_seminorm(a) * field_norm(f, src)


register_operator(
    RatioOperator(
        "commutator-bmo",
        lambda f, p: commutator(sample_multiplier(p["a"], f), f, p.get("kernel", "riesz-transform"), p["epsilon"], p.get("method", "fft")),
        _bmo_denominator,
    )
)


def verify_operator_bound(
    corpus: list[CorpusFunction],
    operator: str,
    source,
    target,
    disc: Discretization,
    theorem_id: str | None = None,
    params: dict | None = None,
    drift_factor: float = 1.25,
) -> RatioReport:
    """Ratios ``||Op f||_target / denominator`` for a registered operator."""
    op = get_operator(operator)
    if not corpus:
        raise InvalidCorpusError("corpus is empty")
    p = {**op.defaults, **(params or {})}
    exps = _exponents(source, target)
    exps.update({k: v for k, v in p.items() if isinstance(v, (int, float)) and not isinstance(v, bool)})
    report = RatioReport(theorem_id or operator, exps, drift_factor=drift_factor)
    for res, grid, time in disc.levels():
        for fid, f in sample_corpus(corpus, grid, time):
            lhs = field_norm(op.apply(f, p), target)
            rhs = op.denominator(f, source, p) if op.denominator else field_norm(f, source)
            report.add(fid, res, lhs, rhs, time.steps if time else None)
    return report


def commutator_small_ball(
    corpus: list[CorpusFunction],
    params,
    radii,
    disc: Discretization,
    a="mollified-jump",
    kernel: str = "riesz-transform-1d",
    eps_fraction: float = 1 / 8,
    center=None,
    method: str = "direct",
    slack: float = 0.10,
    theorem_id: str = "commutator-small-ball",
) -> RatioReport:
    """``||C_eps[a, f_r]||_{B_r} / ||f_r||_{B_r}`` over shrinking balls ``B_r``.

    ``f_r`` is the corpus function rescaled into ``B_r(center)`` and
    ``eps = eps_fraction * r``, so for a multiplier with small oscillation
    on small balls the ratio should decrease with ``r``.  Corpus functions
    must be built on the box ``[-1, 1]^n`` (their support then fits in the
    ball of radius ``0.3 sqrt(n) + 0.5``).
    """
    if not corpus:
        raise InvalidCorpusError("corpus is empty")
    reach = 0.3 * math.sqrt(disc.n) + 0.5
    report = RatioReport(theorem_id, {"eps_fraction": eps_fraction, **_exponents(params, params)}, mode="trend", slack=slack)
    for res, grid, time in disc.levels():
        x0 = np.zeros(grid.n) if center is None else np.asarray(center, dtype=np.float64)
        for r in radii:
            mask = np.sum((grid.centers() - x0) ** 2, axis=-1) < r * r
            scale = reach / r
            for fn in corpus:
                if fn.timed:
                    g = sample(lambda x, t, e=fn.expr: e((x - x0) * scale, t), grid, time)
                else:
                    g = sample(lambda x, e=fn.expr: e((x - x0) * scale), grid)
                    if time is not None:
                        g = SampledField(grid, np.broadcast_to(g.values, (time.steps,) + grid.extent), time)
                C = commutator(sample_multiplier(a, g), g, kernel, eps_fraction * r, method)
                report.add(fn.function_id, res, field_norm(C, params, mask), field_norm(g, params, mask), time.steps if time else None, r)
    return report
