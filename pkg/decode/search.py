"""
Search over letter sequences.

Decoders run against a StepModel: something that yields next-symbol log-probabilities for
a prefix. NeuralStepModel wraps the attention decoder; tests plug in hand-made tables.

Scores are raw accumulated log-probabilities (no length normalization). Ties are broken by
lexicographic order of symbol ids. A hypothesis is finished once it emits the end symbol;
decoding stops after max_len symbols either way.
"""

import logging
from dataclasses import dataclass
from typing import Any, List, Mapping, Optional, Protocol, Tuple

import numpy as np

from common.config import ModelConfig
from common.errors import SearchSpaceError
from features import extract_features
from numcore import Tensor
from seq2seq import Vocabulary, attention_memory, decoder_step, encode_sequence

logger = logging.getLogger(__name__)

MAX_SEARCH_SPACE = 10 ** 6
DEFAULT_MAX_LEN = 20
DEFAULT_BEAM_WIDTHS = (1, 3, 5)


class StepModel(Protocol):
    vocab_size: int
    start_id: int
    end_id: int

    def initial_state(self) -> Any: ...

    def step(self, prev: int, state: Any) -> Tuple[np.ndarray, Any, Optional[np.ndarray]]:
        """Log-probabilities over the vocabulary, the next state, and the attention column."""
        ...


class NeuralStepModel:
    """StepModel over the trained network for one frame sequence (inference mode, no dropout)."""

    def __init__(self, params: Mapping[str, Tensor], config: ModelConfig, frames):
        self.params = params
        self.vocab = Vocabulary(config.letters)
        self.vocab_size = self.vocab.size
        self.start_id = self.vocab.start_id
        self.end_id = self.vocab.end_id
        features = extract_features(frames, params, config, training=False, compute_loss=False).features
        states, self._final = encode_sequence(params, features)
        self.memory = attention_memory(params, states)

    @property
    def num_frames(self) -> int:
        return self.memory.length

    def initial_state(self):
        return self._final

    def step(self, prev: int, state):
        out = decoder_step(self.params, prev, state, self.memory, self.vocab)
        return out.log_probs.data, out.state, out.alpha.data


@dataclass(frozen=True)
class Hypothesis:
    letters: Tuple[int, ...]
    log_prob: float
    state: Any
    finished: bool
    alphas: Tuple[np.ndarray, ...] = ()

    def last(self, start_id: int) -> int:
        return self.letters[-1] if self.letters else start_id

    def extend(self, symbol: int, log_prob: float, state, alpha, end_id: int) -> "Hypothesis":
        alphas = self.alphas + ((alpha,) if alpha is not None else ())
        return Hypothesis(self.letters + (symbol,), log_prob, state, symbol == end_id, alphas)

    def word(self, vocab: Vocabulary) -> str:
        return vocab.decode(self.letters)


def _rank_key(h: Hypothesis):
    return (-h.log_prob, h.letters)


def _initial(model: StepModel) -> Hypothesis:
    return Hypothesis((), 0.0, model.initial_state(), False)


def greedy_decode(model: StepModel, max_len: int = DEFAULT_MAX_LEN) -> Hypothesis:
    """Emit the highest-scoring symbol at each step until the end symbol or max_len."""
    if max_len < 1:
        raise ValueError(f"max_len must be >= 1, got {max_len}")
    hyp = _initial(model)
    for _ in range(max_len):
        log_probs, state, alpha = model.step(hyp.last(model.start_id), hyp.state)
        scores = hyp.log_prob + log_probs
        best = int(np.argmax(scores))
        hyp = hyp.extend(best, float(scores[best]), state, alpha, model.end_id)
        if hyp.finished:
            break
    return hyp


def beam_decode(model: StepModel, beam_width: int, max_len: int = DEFAULT_MAX_LEN) -> List[Hypothesis]:
    """
    Keep the beam_width best hypotheses per step; finished hypotheses stay in the beam
    without further extension. Returns the final beam sorted best first.

    Raises:
        ValueError: beam_width < 1 or max_len < 1.
    """
    if beam_width < 1:
        raise ValueError(f"beam width must be >= 1, got {beam_width}")
    if max_len < 1:
        raise ValueError(f"max_len must be >= 1, got {max_len}")
    beam = [_initial(model)]
    for _ in range(max_len):
        if all(h.finished for h in beam):
            break
        candidates: List[Hypothesis] = []
        for hyp in beam:
            if hyp.finished:
                candidates.append(hyp)
                continue
            log_probs, state, alpha = model.step(hyp.last(model.start_id), hyp.state)
            scores = hyp.log_prob + log_probs
            for symbol in range(model.vocab_size):
                candidates.append(hyp.extend(symbol, float(scores[symbol]), state, alpha, model.end_id))
        candidates.sort(key=_rank_key)
        beam = candidates[:beam_width]
    return sorted(beam, key=_rank_key)


def exhaustive_decode(model: StepModel, max_len: int) -> Hypothesis:
    """
    Best sequence over every path of at most max_len symbols (ending at the end symbol or
    truncated at max_len). Test oracle for beam search.

    Raises:
        SearchSpaceError: vocab_size ** max_len exceeds MAX_SEARCH_SPACE.
    """
    if max_len < 1:
        raise ValueError(f"max_len must be >= 1, got {max_len}")
    if model.vocab_size ** max_len > MAX_SEARCH_SPACE:
        raise SearchSpaceError(f"{model.vocab_size}^{max_len} sequences exceed the cap of {MAX_SEARCH_SPACE}")

    best: Optional[Hypothesis] = None
    stack = [_initial(model)]
    while stack:
        hyp = stack.pop()
        if hyp.finished or len(hyp.letters) == max_len:
            if best is None or _rank_key(hyp) < _rank_key(best):
                best = hyp
            continue
        log_probs, state, alpha = model.step(hyp.last(model.start_id), hyp.state)
        scores = hyp.log_prob + log_probs
        for symbol in range(model.vocab_size):
            stack.append(hyp.extend(symbol, float(scores[symbol]), state, alpha, model.end_id))
    return best


def decode_with_attention(frames, params: Mapping[str, Tensor], config: ModelConfig, beam_width: int = 1,
                          max_len: int = DEFAULT_MAX_LEN) -> Tuple[str, np.ndarray, Hypothesis]:
    """Top hypothesis for a frame sequence with its (steps x frames) attention matrix."""
    model = NeuralStepModel(params, config, frames)
    top = beam_decode(model, beam_width, max_len)[0]
    alpha = np.stack(top.alphas) if top.alphas else np.zeros((0, model.num_frames))
    return top.word(model.vocab), alpha, top
