"""
Word instances: the unit of labeled data.

A dataset is a list of WordInstance records (signer, word, per-instance seed);
frames come from a FrameSource. Every signer signs the same word list.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Dict, List, Sequence

from common.config import ALPHABET, DataConfig
from numcore import rng_for
from .synth import check_word, sequence_length

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WordInstance:
    index: int
    signer: int
    word: str
    seed: int
    num_frames: int

    def to_record(self) -> Dict[str, object]:
        return asdict(self)


def make_word_list(n_words: int, min_len: int, max_len: int, seed: int, letters: str = ALPHABET) -> List[str]:
    """Distinct random words with lengths in [min_len, max_len]."""
    rng = rng_for(seed, "word-list")
    words: List[str] = []
    seen = set()
    attempts = 0
    while len(words) < n_words:
        attempts += 1
        if attempts > 1000 * n_words:
            raise ValueError(f"cannot draw {n_words} distinct words of length {min_len}..{max_len}")
        length = int(rng.integers(min_len, max_len + 1))
        word = "".join(letters[int(i)] for i in rng.integers(len(letters), size=length))
        if word not in seen:
            seen.add(word)
            words.append(word)
    return words


def make_dataset(config: DataConfig, words: Sequence[str] = ()) -> List[WordInstance]:
    """
    One instance per (signer, word); signers are numbered from 1.

    Instance seeds derive from (data_seed, index), so each instance can be
    regenerated independently of the others.
    """
    words = list(words) or make_word_list(config.words_per_signer, config.word_min_len,
                                          config.word_max_len, config.data_seed)
    instances: List[WordInstance] = []
    for signer in range(1, config.n_signers + 1):
        for word in words:
            check_word(word)
            index = len(instances)
            seed = int(rng_for(config.data_seed, "instance", index).integers(2 ** 31))
            instances.append(WordInstance(
                index=index, signer=signer, word=word, seed=seed,
                num_frames=sequence_length(len(word), config.frames_per_letter, config.transition_frames),
            ))
    logger.info(f"Dataset: {config.n_signers} signers x {len(words)} words = {len(instances)} instances")
    return instances
