"""
Decoding-based evaluation of a trained model over word instances.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Sequence, Tuple

from common.config import ModelConfig
from decode import NeuralStepModel, beam_decode, greedy_decode
from numcore import Tensor
from .metrics import ConfusionMatrix, confusion_matrix, edit_distance, letter_error_rate

logger = logging.getLogger(__name__)


@dataclass
class EvaluationResult:
    ler: float
    pairs: List[Tuple[str, str]]
    confusion: ConfusionMatrix

    @property
    def letter_accuracy(self) -> float:
        return 1.0 - self.ler / 100.0


@dataclass
class BeamStudy:
    widths: Tuple[int, ...]
    ler: Dict[int, float]
    # (reference, {width: hypothesis}) per instance
    outputs: List[Tuple[str, Dict[int, str]]] = field(default_factory=list)


def decode_word(params: Mapping[str, Tensor], config: ModelConfig, frames, beam_width: int = 1,
                max_len: int = 20) -> str:
    model = NeuralStepModel(params, config, frames)
    if beam_width == 1:
        return greedy_decode(model, max_len).word(model.vocab)
    return beam_decode(model, beam_width, max_len)[0].word(model.vocab)


def evaluate(params: Mapping[str, Tensor], config: ModelConfig, examples: Sequence[Tuple[object, str]],
             beam_width: int = 1, max_len: int = 20) -> EvaluationResult:
    """
    Decode each (frames, word) example and score the outputs.

    Raises:
        ValueError: no examples.
    """
    pairs = [(decode_word(params, config, frames, beam_width, max_len), word) for frames, word in examples]
    ler = letter_error_rate(pairs)
    confusion = confusion_matrix((edit_distance(hyp, ref) for hyp, ref in pairs), config.letters)
    logger.info(f"Evaluated {len(pairs)} words with beam width {beam_width}: LER {ler:.2f}%")
    return EvaluationResult(ler=ler, pairs=pairs, confusion=confusion)


def beam_width_study(params: Mapping[str, Tensor], config: ModelConfig, examples: Sequence[Tuple[object, str]],
                     widths: Sequence[int] = (1, 3, 5), max_len: int = 20) -> BeamStudy:
    """LER for each beam width plus every instance's output under each width."""
    widths = tuple(widths)
    outputs: List[Tuple[str, Dict[int, str]]] = []
    for frames, word in examples:
        model = NeuralStepModel(params, config, frames)
        outputs.append((word, {b: beam_decode(model, b, max_len)[0].word(model.vocab) for b in widths}))
    ler = {b: letter_error_rate((hyps[b], ref) for ref, hyps in outputs) for b in widths}
    for b in widths:
        logger.info(f"Beam width {b}: LER {ler[b]:.2f}%")
    return BeamStudy(widths=widths, ler=ler, outputs=outputs)
