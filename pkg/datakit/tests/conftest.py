"""
Shared fixtures for data tests
"""
import pytest

from common.config import DataConfig
from datakit import WordInstance


def instances(n_per_signer: int, signers=(1, 2, 3, 4)):
    """Bare word instances; splits never look at frames."""
    out = []
    for signer in signers:
        for k in range(n_per_signer):
            out.append(WordInstance(index=len(out), signer=signer, word="AB", seed=len(out), num_frames=4))
    return out


@pytest.fixture
def tiny_data_config():
    return DataConfig(n_signers=2, words_per_signer=3, frames_per_letter=2, transition_frames=1,
                      word_min_len=2, word_max_len=3, unlabeled_frames=16, unlabeled_styles=2, data_seed=4)
