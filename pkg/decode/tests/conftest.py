"""
Hand-made step models for search tests
"""
from typing import Callable, Dict, Tuple

import numpy as np
import pytest

from numcore import rng_for


class TableStepModel:
    """
    StepModel whose next-symbol distribution is a function of the emitted prefix.

    Symbols are 0..vocab_size-1 with the last one as the end symbol; the start symbol is
    vocab_size and is never emitted.
    """

    def __init__(self, table: Callable[[Tuple[int, ...]], np.ndarray], vocab_size: int = 4):
        self.table = table
        self.vocab_size = vocab_size
        self.end_id = vocab_size - 1
        self.start_id = vocab_size
        self.calls = 0

    def initial_state(self):
        return ()

    def step(self, prev, state):
        self.calls += 1
        prefix = state if prev == self.start_id else state + (prev,)
        probs = np.asarray(self.table(prefix), dtype=np.float64)
        with np.errstate(divide="ignore"):
            return np.log(probs), prefix, None


def random_table_model(seed: int, vocab_size: int = 4) -> TableStepModel:
    cache: Dict[Tuple[int, ...], np.ndarray] = {}

    def table(prefix):
        if prefix not in cache:
            cache[prefix] = rng_for(seed, "table", *prefix).dirichlet(np.full(vocab_size, 0.7))
        return cache[prefix]

    return TableStepModel(table, vocab_size)


@pytest.fixture
def trap_model():
    """Greedy takes A (0.6) and ends at 0.204; B then end scores 0.36."""
    rows = {
        (): [0.6, 0.4, 1e-9],
        (0,): [0.34, 0.33, 0.33],
        (1,): [0.05, 0.05, 0.9],
    }
    return TableStepModel(lambda prefix: rows.get(prefix, [1 / 3, 1 / 3, 1 / 3]), vocab_size=3)
