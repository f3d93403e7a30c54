"""
Shared fixtures for feature extractor tests
"""
import numpy as np
import pytest

from common.config import ModelConfig
from numcore import Tensor, rng_for

TINY = dict(image_size=8, hidden_units=8, latent_dim=4, lstm_hidden=8, embed_dim=8, attention_dim=8)


def tiny_config(mode: str, **changes) -> ModelConfig:
    return ModelConfig(mode=mode, **{**TINY, **changes})


@pytest.fixture
def frames():
    """Three 8x8 frames with values strictly inside (0, 1)."""
    return rng_for(3, "feature-frames").uniform(0.2, 0.8, size=(3, 64))


@pytest.fixture
def zero_params():
    def build(config: ModelConfig):
        from features import feature_param_shapes
        return {name: Tensor(np.zeros(shape), name=name, requires_grad=True)
                for name, shape in feature_param_shapes(config).items()}
    return build
