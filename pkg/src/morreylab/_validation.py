"""Small argument checks shared across modules."""

from __future__ import annotations

import math

import numpy as np

from .errors import IncompatibleFieldsError, InvalidExponentError, InvalidFieldError
from .grid import SampledField


def check_field(f, *, spatial: bool | None = None, name: str = "f") -> SampledField:
    if not isinstance(f, SampledField):
        raise InvalidFieldError(f"{name} must be a SampledField, got {type(f).__name__}")
    if spatial is True and not f.is_spatial:
        raise InvalidFieldError(f"{name} must be a spatial field (no time axis)")
    if spatial is False and f.is_spatial:
        raise InvalidFieldError(f"{name} must carry a time axis")
    return f


def check_same_grid(*fields: SampledField) -> None:
    first = fields[0]
    for other in fields[1:]:
        if not first.compatible(other):
            raise IncompatibleFieldsError("fields live on different grids or time axes")


def check_open_interval(value: float, lo: float, hi: float, name: str) -> float:
    value = float(value)
    if not (lo < value < hi) or math.isnan(value):
        raise InvalidExponentError(f"{name}={value} must lie in ({lo}, {hi})")
    return value


def as_float_array(values) -> np.ndarray:
    a = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(a)):
        raise InvalidFieldError("values must be finite")
    return a
