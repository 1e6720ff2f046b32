"""Ratio sweeps for the a-priori bounds of D_ij u and u_t by L u."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..embeddings.reports import RatioReport
from ..embeddings.verify import Discretization
from ..errors import SupportViolationError
from ..grid import sample
from ..norms import MixedParams, mixed_morrey_norm
from .coefficients import CoefficientField, coefficient_family, validate_coefficients
from .solutions import StrongSolutionSample, apply_L

__all__ = ["AprioriResult", "apriori_check", "tail_stable"]


def tail_stable(report: RatioReport, factor: float) -> bool:
    """The max ratio at the smallest radius is at most ``factor`` times the one before it."""
    sweep = [v for _, v in report.radius_sweep]
    if not sweep or any(v is None or not math.isfinite(v) for v in sweep):
        return False
    return len(sweep) < 2 or sweep[-1] <= factor * sweep[-2]


@dataclass
class AprioriResult:
    """Hessian and time-derivative ratio reports plus the triangle-inequality check.

    ``consistency`` holds ``(function_id, resolution, radius, ||u_t||, bound)``
    with ``bound = ||Lu|| + sum_ij ||a_ij||_inf ||D_ij u||``.
    """

    hessian: RatioReport
    time: RatioReport
    consistency: list = field(default_factory=list)
    validation: dict = field(default_factory=dict)

    def __iter__(self):
        return iter((self.hessian, self.time))

    @property
    def consistency_ok(self) -> bool:
        return all(lhs <= bound * (1 + 1e-12) for *_, lhs, bound in self.consistency)

    def tail_stable(self) -> bool:
        return tail_stable(self.hessian, self.hessian.drift_factor) and tail_stable(self.time, self.time.drift_factor)

    @property
    def passed(self) -> bool:
        return self.hessian.passed and self.time.passed and self.consistency_ok and self.tail_stable()


def _coefficients(spec, grid, time) -> CoefficientField:
    if isinstance(spec, CoefficientField):
        return spec
    if isinstance(spec, str):
        return coefficient_family(spec)(grid, time)
    return spec(grid, time)


def apriori_check(
    family,
    coefficients,
    params: MixedParams,
    radii,
    disc: Discretization,
    center=None,
    drift_factor: float = 1.25,
    theorem_id: str = "apriori",
) -> AprioriResult:
    """Ratios ``||D_ij u|| / ||Lu||`` and ``||u_t|| / ||Lu||`` over a radius sweep.

    ``family`` is a list of ``(id, U)`` with ``U(x, t)`` supported in the unit
    ball (see :func:`manufactured_solutions` with ``radius=1``); for radius
    ``r`` the sample is ``U((x - center) / r, t)``.  ``coefficients`` is a
    family name, a factory ``(grid, time) -> CoefficientField``, or a field.
    Zero denominators are logged as degenerate rows.
    """
    if disc.steps is None:
        raise SupportViolationError("the a-priori check needs a time axis")
    exps = {"q": params.q, "mu": params.mu, "p": params.spatial.p, "lam": params.spatial.lam}
    hess = RatioReport(f"{theorem_id}-hessian", dict(exps), drift_factor=drift_factor)
    tder = RatioReport(f"{theorem_id}-time", dict(exps), drift_factor=drift_factor)
    result = AprioriResult(hess, tder)
    for res, grid, time in disc.levels():
        a = _coefficients(coefficients, grid, time)
        result.validation[res] = validate_coefficients(a)
        x0 = np.zeros(grid.n) if center is None else np.asarray(center, dtype=np.float64)
        sup = {(i, j): a.sup_norm(i, j) for i in range(grid.n) for j in range(grid.n)}
        for r in radii:
            for fid, U in family:
                f = sample(lambda x, t, U=U: U((x - x0) / r, t), grid, time)
                s = StrongSolutionSample.from_field(f)
                if not s.supported_in(x0, r):
                    raise SupportViolationError(f"{fid} is not supported in B_{r} x (0, T)")
                Lu = mixed_morrey_norm(apply_L(a, s), params).value
                norms = {}
                for i in range(grid.n):
                    for j in range(i, grid.n):
                        norms[i, j] = norms[j, i] = mixed_morrey_norm(s.hessian[i][j], params).value
                        hess.add(f"{fid}:D{i + 1}{j + 1}", res, norms[i, j], Lu, time.steps, r)
                ut = mixed_morrey_norm(s.ut, params).value
                tder.add(fid, res, ut, Lu, time.steps, r)
                bound = Lu + sum(sup[k] * norms[k] for k in sup)
                result.consistency.append((fid, res, float(r), ut, bound))
    return result
