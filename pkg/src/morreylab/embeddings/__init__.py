"""Exponent relations, corpora and ratio-based verification of the inequalities."""

from .corpus import SPATIAL_GENERATORS, TEMPORAL_GENERATORS, CorpusFunction, CorpusSpec, build_corpus, sample_corpus
from .exponents import (
    ExponentRelation,
    adams_corollary_exponents,
    adams_exponent,
    composite_admissible,
    composite_embedding_exponents,
    fractional_maximal_exponent,
    morrey_embedding_exponent,
    morrey_pair_admissible,
    relaxed_composite_embedding,
    relaxed_morrey_embedding,
    relaxed_temporal_embedding,
    temporal_embedding_exponent,
    temporal_pair_admissible,
)
from .reports import RatioReport, RatioRow
from .verify import (
    Discretization,
    RatioOperator,
    commutator_small_ball,
    field_norm,
    get_operator,
    multiplier,
    operator_names,
    register_operator,
    verify_embedding,
    verify_operator_bound,
)

__all__ = [name for name in dir() if not name.startswith("_")]
