"""Convolution of batched grid arrays with full-offset kernel tables.

A table for an array with trailing shape ``(N_1, ..., N_k)`` has shape
``(2 N_1 - 1, ..., 2 N_k - 1)``; entry ``d + (N - 1)`` weights ``f(x - d)``.
"""

from __future__ import annotations

import numpy as np

from ..errors import InvalidFieldError
from ..grid import _shift_slices

METHODS = ("direct", "fft")


def convolve_table(values: np.ndarray, table: np.ndarray, ndim: int, method: str = "direct") -> np.ndarray:
    """``out[x] = sum_d table[d] * values[x - d]`` over the trailing ``ndim`` axes."""
    values = np.asarray(values, dtype=np.float64)
    extent = values.shape[values.ndim - ndim :]
    if table.shape != tuple(2 * e - 1 for e in extent):
        raise InvalidFieldError(f"kernel table {table.shape} does not fit array extent {extent}")
    if method == "direct":
        return _direct(values, table, extent)
    if method == "fft":
        return _fft(values, table, extent)
    raise InvalidFieldError(f"unknown convolution method {method!r}; expected one of {METHODS}")


def _direct(values, table, extent):
    lead = (slice(None),) * (values.ndim - len(extent))
    out = np.zeros_like(values)
    center = np.array([e - 1 for e in extent])
    for idx in zip(*np.nonzero(table)):
        d = np.array(idx) - center
        dst, src = _shift_slices(-d, extent)
        out[lead + dst] += table[idx] * values[lead + src]
    return out


def _fft(values, table, extent):
    from scipy.signal import fftconvolve

    ndim = len(extent)
    axes = tuple(range(values.ndim - ndim, values.ndim))
    kernel = table.reshape((1,) * (values.ndim - ndim) + table.shape)
    full = fftconvolve(values, kernel, mode="full", axes=axes)
    sl = (slice(None),) * (values.ndim - ndim) + tuple(slice(e - 1, 2 * e - 1) for e in extent)
    return np.ascontiguousarray(full[sl])
