"""
Shared fixtures for sequence model tests
"""
import numpy as np
import pytest

from common.config import ModelConfig
from numcore import Tensor, rng_for

TINY = dict(image_size=8, hidden_units=8, latent_dim=4, lstm_hidden=8, embed_dim=8, attention_dim=8)


def tiny_config(mode: str = "vae", **changes) -> ModelConfig:
    return ModelConfig(mode=mode, **{**TINY, **changes})


def zeroed(params, *names):
    """Copy of params with the named tensors replaced by zeros."""
    out = dict(params)
    for name in names:
        out[name] = Tensor(np.zeros(params[name].shape), name=name, requires_grad=True)
    return out


@pytest.fixture
def frames():
    return rng_for(11, "seq-frames").uniform(0.2, 0.8, size=(3, 64))


@pytest.fixture
def latents():
    return rng_for(12, "seq-latents").normal(size=(7, 4))
