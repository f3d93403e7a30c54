"""
Greedy, beam and exhaustive decoding of letter sequences.
"""

from .search import (
    StepModel,
    NeuralStepModel,
    Hypothesis,
    greedy_decode,
    beam_decode,
    exhaustive_decode,
    decode_with_attention,
    MAX_SEARCH_SPACE,
    DEFAULT_MAX_LEN,
    DEFAULT_BEAM_WIDTHS,
)

__all__ = [
    "StepModel", "NeuralStepModel", "Hypothesis", "greedy_decode", "beam_decode",
    "exhaustive_decode", "decode_with_attention", "MAX_SEARCH_SPACE", "DEFAULT_MAX_LEN",
    "DEFAULT_BEAM_WIDTHS",
]
