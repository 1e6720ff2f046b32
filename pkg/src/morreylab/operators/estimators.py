"""scikit-learn style transformers wrapping the field operators.

``fit`` only validates its input (the operators have no learned state) and
``transform`` applies the operator to a :class:`SampledField` or a list of
them.  ``get_params`` / ``set_params`` come from ``BaseEstimator``.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin

from .._validation import check_field
from ..errors import InvalidFieldError
from ..grid import SampledField
from .maximal import MaximalParams, fractional_maximal, hl_maximal, sharp_maximal
from .riesz import riesz_potential
from .singular import commutator, truncated_singular_integral

__all__ = [
    "HardyLittlewoodMaximal",
    "SharpMaximal",
    "FractionalMaximal",
    "RieszPotential",
    "TruncatedSingularIntegral",
    "Commutator",
]


class _FieldTransformer(TransformerMixin, BaseEstimator):
    def fit(self, X, y=None):
        for f in self._fields(X):
            check_field(f, name="X")
        self._check_params()
        self.fitted_ = True
        return self

    def transform(self, X):
        if isinstance(X, SampledField):
            return self._apply(X)
        return [self._apply(f) for f in self._fields(X)]

    @staticmethod
    def _fields(X):
        if isinstance(X, SampledField):
            return [X]
        try:
            return list(X)
        except TypeError:
            raise InvalidFieldError("expected a SampledField or an iterable of them") from None

    def _check_params(self):
        pass

    def _apply(self, f):
        raise NotImplementedError


class HardyLittlewoodMaximal(_FieldTransformer):
    def __init__(self, radii=None):
        self.radii = radii

    def _apply(self, f):
        return hl_maximal(f, self.radii)


class SharpMaximal(_FieldTransformer):
    def __init__(self, radii=None):
        self.radii = radii

    def _apply(self, f):
        return sharp_maximal(f, self.radii)


class FractionalMaximal(_FieldTransformer):
    def __init__(self, eta=0.25, oscillation=True, radii=None):
        self.eta = eta
        self.oscillation = oscillation
        self.radii = radii

    def _params(self):
        return MaximalParams("fractional", self.eta, self.oscillation)

    def _check_params(self):
        self._params()

    def _apply(self, f):
        return fractional_maximal(f, self._params(), self.radii)


class RieszPotential(_FieldTransformer):
    def __init__(self, alpha=1.0, method="direct"):
        self.alpha = alpha
        self.method = method

    def _apply(self, f):
        return riesz_potential(f, self.alpha, self.method)


class TruncatedSingularIntegral(_FieldTransformer):
    def __init__(self, kernel="riesz-transform", epsilon=0.1, method="direct"):
        self.kernel = kernel
        self.epsilon = epsilon
        self.method = method

    def _apply(self, f):
        return truncated_singular_integral(f, self.kernel, self.epsilon, self.method)


class Commutator(_FieldTransformer):
    """Commutator with a fixed multiplier field ``a`` (a constructor parameter)."""

    def __init__(self, a=None, kernel="riesz-transform", epsilon=0.1, method="direct"):
        self.a = a
        self.kernel = kernel
        self.epsilon = epsilon
        self.method = method

    def _check_params(self):
        check_field(self.a, name="a")

    def _apply(self, f):
        return commutator(self.a, f, self.kernel, self.epsilon, self.method)
