"""
Shared fixtures for training tests
"""
import pytest

from common.config import DataConfig, ExperimentConfig, ModelConfig, TrainConfig
from datakit import ExperimentSplit, create_frame_source, make_dataset

TINY_MODEL = dict(image_size=8, hidden_units=8, latent_dim=4, lstm_hidden=6, embed_dim=6, attention_dim=6)
TINY_DATA = dict(n_signers=2, words_per_signer=4, frames_per_letter=1, transition_frames=1,
                 word_min_len=2, word_max_len=2, unlabeled_frames=40, unlabeled_styles=2, data_seed=2)


def experiment(mode: str = "vae", **train) -> ExperimentConfig:
    settings = dict(batch_size=2, max_epochs=2, pretrain_epochs=1, adapt_epochs=1, retain_p=1.0, max_len=3,
                    beam_widths=(1, 2))
    settings.update(train)
    return ExperimentConfig(model=ModelConfig(mode=mode, **TINY_MODEL), data=DataConfig(**TINY_DATA),
                            train=TrainConfig(**settings))


@pytest.fixture
def config():
    return experiment()


@pytest.fixture
def dataset(config):
    return make_dataset(config.data)


@pytest.fixture
def source(config):
    return create_frame_source("synthetic", config=config.data, size=config.model.image_size)


@pytest.fixture
def small_split(dataset):
    """Three training words and two validation words from signer 1."""
    own = [inst for inst in dataset if inst.signer == 1]
    return ExperimentSplit("SD", train=own[:3], validation=own[3:4] + [dataset[-1]], test=own[3:4], fold=1)
