"""Parameter initialization and dropout."""

import math
from typing import Optional, Sequence

import numpy as np

from common.errors import ShapeError
from .ops import mul
from .rng import rng_for
from .tensor import Tensor


def _fans(shape: Sequence[int]):
    if len(shape) == 1:
        return shape[0], shape[0]
    return int(np.prod(shape[:-1])), shape[-1]


def xavier_init(shape: Sequence[int], seed: int, name: Optional[str] = None) -> Tensor:
    """
    Uniform Xavier initialization in ±sqrt(6 / (fan_in + fan_out)).

    For a 2-D weight (fan_in, fan_out) the first axis is the input side. The stream is
    keyed by (seed, name) so every parameter draws independently.
    """
    shape = tuple(int(d) for d in shape)
    if len(shape) == 0:
        raise ShapeError("xavier_init needs at least one dimension")
    if any(d < 1 for d in shape):
        raise ShapeError(f"xavier_init: zero-sized dimension in shape {shape}")
    fan_in, fan_out = _fans(shape)
    bound = math.sqrt(6.0 / (fan_in + fan_out))
    values = rng_for(seed, "xavier", name or "").uniform(-bound, bound, size=shape)
    return Tensor(values, name=name, requires_grad=True)


def zeros(shape: Sequence[int], name: Optional[str] = None) -> Tensor:
    return Tensor(np.zeros(tuple(shape)), name=name, requires_grad=True)


def dropout(t: Tensor, retain_p: float, seed: int, training: bool = True, label: str = "dropout") -> Tensor:
    """
    Inverted dropout: keep each entry with probability retain_p and scale by 1/retain_p.

    Inference (training=False) and retain_p == 1 return the input unchanged.
    """
    if not 0.0 < retain_p <= 1.0:
        raise ValueError(f"dropout retain probability must be in (0, 1], got {retain_p}")
    if not training or retain_p == 1.0:
        return t
    keep = rng_for(seed, "dropout", label).random(t.shape) < retain_p
    return mul(t, keep / retain_p)
