"""
Dense-tensor numerical core with reverse-mode automatic differentiation.

Every other package computes on numcore.Tensor and records its forward pass on a
numcore.Tape so that numcore.backprop can return gradients per parameter.
"""

from .tensor import Tensor, Tape, TapeRecord, backprop, active_tape, constant
from .ops import (
    matmul,
    add,
    sub,
    mul,
    neg,
    tanh,
    sigmoid,
    relu,
    exp,
    log,
    softmax,
    log_softmax,
    concat,
    stack,
    lookup,
    gather_rows,
    sum,
    mean,
    clamp,
)
from .rng import rng_for, derive_key
from .init import xavier_init, zeros, dropout
from .optim import AdamState, adam_step, clip_by_global_norm
from .gradcheck import GradCheckResult, finite_difference_check

__all__ = [
    "Tensor", "Tape", "TapeRecord", "backprop", "active_tape", "constant",
    "matmul", "add", "sub", "mul", "neg", "tanh", "sigmoid", "relu", "exp", "log",
    "softmax", "log_softmax", "concat", "stack", "lookup", "gather_rows", "sum", "mean", "clamp",
    "rng_for", "derive_key",
    "xavier_init", "zeros", "dropout",
    "AdamState", "adam_step", "clip_by_global_norm",
    "GradCheckResult", "finite_difference_check",
]
