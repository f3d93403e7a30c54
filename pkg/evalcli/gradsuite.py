"""
Finite-difference check of the multitask loss on a tiny model, per feature-extractor mode.
"""

import logging
from typing import Dict, Sequence

from common.config import MODES, ModelConfig
from features import CorruptionSpec
from numcore import GradCheckResult, finite_difference_check, rng_for
from seq2seq import init_params, multitask_loss

logger = logging.getLogger(__name__)

TINY_SIZES = dict(image_size=8, hidden_units=8, latent_dim=4, lstm_hidden=8, embed_dim=8, attention_dim=8)
TINY_FRAMES = 3
TINY_WORD = "HI"


def tiny_model_config(mode: str, **changes) -> ModelConfig:
    return ModelConfig(mode=mode, **{**TINY_SIZES, **changes})


def multitask_gradcheck(config: ModelConfig, seed: int = 0, eps: float = 1e-5, word: str = TINY_WORD,
                        num_frames: int = TINY_FRAMES) -> GradCheckResult:
    """
    Compare backprop against central differences for every parameter of the multitask loss.

    Frames are drawn away from 0 and 1 so that no pixel sits on a boundary. Dropout is off;
    VAE noise and DAE corruption are seeded, which keeps the loss deterministic.
    """
    frames = rng_for(seed, "gradcheck-frames").uniform(0.2, 0.8, size=(num_frames, config.image_dim))
    params = init_params(config, seed)
    lambda_ae = 1.0 if config.has_ae_loss else 0.0
    corruption = CorruptionSpec("mask", 0.25, seed)

    def loss_fn(p):
        return multitask_loss(frames, word, p, config, lambda_ae, seed=seed, corruption=corruption,
                              label="gradcheck")

    result = finite_difference_check(loss_fn, params, eps=eps)
    logger.info(f"gradcheck mode={config.mode}: max relative error {result.max_rel_error:.3e} ({result.worst})")
    return result


def gradcheck_suite(modes: Sequence[str] = MODES, seed: int = 0) -> Dict[str, GradCheckResult]:
    return {mode: multitask_gradcheck(tiny_model_config(mode), seed) for mode in modes}
