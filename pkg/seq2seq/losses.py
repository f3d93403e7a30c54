"""
Training objectives.

sequence_nll: mean negative log-probability over the T + 1 target positions (the letters
plus the end symbol) under teacher forcing.
multitask_loss: sequence_nll + lambda_ae * (mean over frames of the auto-encoder loss).
"""

import logging
from dataclasses import dataclass, field
from typing import List, Mapping, Optional, Sequence, Union

import numpy as np

import numcore as nc
from common.config import ModelConfig
from common.errors import DataError
from features import CorruptionSpec, extract_features
from numcore import Tensor
from .model import attention_memory, decoder_step, encode_sequence
from .vocab import Vocabulary

logger = logging.getLogger(__name__)

Params = Mapping[str, Tensor]
Letters = Union[str, Sequence[int]]


@dataclass
class TeacherForcedResult:
    loss: Tensor
    step_probs: List[np.ndarray] = field(default_factory=list)
    alphas: List[np.ndarray] = field(default_factory=list)


@dataclass
class LossBreakdown:
    total: Tensor
    nll: Tensor
    ae: Optional[Tensor]
    ae_evaluations: int = 0


def _letter_ids(letters: Letters, vocab: Vocabulary) -> List[int]:
    ids = vocab.encode(letters) if isinstance(letters, str) else [vocab.check(i) for i in letters]
    if not ids:
        raise DataError("letter sequence must not be empty")
    return ids


def teacher_forced(params: Params, features: Tensor, letters: Letters, vocab: Vocabulary) -> TeacherForcedResult:
    """Decode with ground-truth previous letters and return the mean target NLL with per-step distributions."""
    ids = _letter_ids(letters, vocab)
    states, final = encode_sequence(params, features)
    memory = attention_memory(params, states)
    inputs = [vocab.start_id] + ids
    targets = ids + [vocab.end_id]

    state = final
    log_probs, step_probs, alphas = [], [], []
    for prev, target in zip(inputs, targets):
        step = decoder_step(params, prev, state, memory, vocab)
        log_probs.append(nc.lookup(step.log_probs, target))
        step_probs.append(step.probs.data)
        alphas.append(step.alpha.data)
        state = step.state
    loss = nc.mul(nc.sum(nc.stack(log_probs)), -1.0 / len(targets))
    return TeacherForcedResult(loss=loss, step_probs=step_probs, alphas=alphas)


def sequence_nll(frames, letters: Letters, params: Params, config: ModelConfig, seed: int = 0,
                 training: bool = False, retain_p: float = 1.0, label: str = "example") -> Tensor:
    """
    Teacher-forced negative log-likelihood of a word given its frames.

    Raises:
        DataError: empty letter sequence or letters outside the alphabet.
    """
    vocab = Vocabulary(config.letters)
    ids = _letter_ids(letters, vocab)
    out = extract_features(frames, params, config, seed=seed, training=training, retain_p=retain_p,
                           compute_loss=False, label=label)
    return teacher_forced(params, out.features, ids, vocab).loss


def multitask_breakdown(frames, letters: Letters, params: Params, config: ModelConfig, lambda_ae: float,
                        seed: int = 0, training: bool = False, retain_p: float = 1.0,
                        corruption: Optional[CorruptionSpec] = None, label: str = "example") -> LossBreakdown:
    """
    Both parts of the multitask loss from one shared feature-extraction pass.

    With lambda_ae == 0 (or a mode without an auto-encoder) no auto-encoder loss is evaluated
    and the total is the sequence NLL itself.
    """
    if lambda_ae < 0:
        raise ValueError(f"lambda_ae must be >= 0, got {lambda_ae}")
    vocab = Vocabulary(config.letters)
    ids = _letter_ids(letters, vocab)
    with_ae = lambda_ae > 0 and config.has_ae_loss
    out = extract_features(frames, params, config, seed=seed, training=training, retain_p=retain_p,
                           corruption=corruption, compute_loss=with_ae, label=label)
    nll = teacher_forced(params, out.features, ids, vocab).loss
    if not with_ae:
        return LossBreakdown(total=nll, nll=nll, ae=None)
    total = nc.add(nll, nc.mul(out.ae_loss, lambda_ae))
    return LossBreakdown(total=total, nll=nll, ae=out.ae_loss, ae_evaluations=out.ae_evaluations)


def multitask_loss(frames, letters: Letters, params: Params, config: ModelConfig, lambda_ae: float,
                   seed: int = 0, training: bool = False, retain_p: float = 1.0,
                   corruption: Optional[CorruptionSpec] = None, label: str = "example") -> Tensor:
    """sequence_nll + lambda_ae * mean per-frame auto-encoder loss."""
    return multitask_breakdown(frames, letters, params, config, lambda_ae, seed, training, retain_p,
                               corruption, label).total
