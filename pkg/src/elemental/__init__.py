"""Unbiased, location- and scale-invariant elemental estimators of the GPD tail parameter."""

__version__ = "0.1.0"

from .estimators import (
    ElementalIndex,
    OrderedSample,
    TieError,
    all_elementals,
    elemental_estimate,
    elemental_indices,
    evaluate_spacing_weights,
    log_spacing_matrix,
)
from .gpd import GpdParams, cdf, pdf, quantile, sample, sf
from .rng import RandomStream
from .weights import (
    ElementalWeights,
    SchemeName,
    SpacingWeights,
    expand,
    linearly_rising,
    linearly_rising_spacing_closed_form,
    named_scheme,
)
