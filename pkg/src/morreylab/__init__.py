"""Numerical Morrey and mixed Morrey space toolkit.

Sampled fields on uniform grids, Morrey/mixed norms, the classical operators
of harmonic analysis acting on them, exponent relations of the embedding and
boundedness results, and a finite-difference model of a nondivergence
parabolic operator with VMO coefficients.
"""

__version__ = "0.1.0"

from .grid import GridSpec, RadiusSet, SampledField, TimeAxis, build_grid, region_integral, sample
from .norms import MixedParams, MorreyParams, bmo_seminorm, lp_norm, mixed_morrey_norm, morrey_norm, vmo_modulus

__all__ = [
    "__version__",
    "GridSpec",
    "TimeAxis",
    "SampledField",
    "RadiusSet",
    "build_grid",
    "sample",
    "region_integral",
    "MorreyParams",
    "MixedParams",
    "lp_norm",
    "morrey_norm",
    "mixed_morrey_norm",
    "bmo_seminorm",
    "vmo_modulus",
]
