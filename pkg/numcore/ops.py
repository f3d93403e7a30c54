"""
Primitive differentiable operations.

The primitive set is fixed: matrix multiply, add, elementwise multiply, tanh, sigmoid,
ReLU, exp, log, softmax, concatenation (along an existing or a new leading axis), row
lookup, and sum/mean reductions. add and mul broadcast only over the leading batch
dimension (or against a 0-d scalar). Everything else (sub, neg, clamp) composes from these.
"""

import logging
from typing import Sequence, Tuple, Union

import numpy as np

from common.errors import NumericError, ShapeError
from .tensor import Tensor, constant, emit

logger = logging.getLogger(__name__)

Operand = Union[Tensor, float, int, np.ndarray]


def _check_broadcast(op: str, a: Tensor, b: Tensor) -> None:
    if a.shape == b.shape or a.data.ndim == 0 or b.data.ndim == 0:
        return
    if a.data.ndim == b.data.ndim + 1 and a.shape[1:] == b.shape:
        return
    if b.data.ndim == a.data.ndim + 1 and b.shape[1:] == a.shape:
        return
    raise ShapeError(f"{op}: shapes {a.shape} and {b.shape} only broadcast over a leading batch dimension")


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    if grad.shape == shape:
        return grad
    if len(shape) == 0:
        return np.asarray(grad.sum())
    return grad.sum(axis=0)


def matmul(a: Operand, b: Operand) -> Tensor:
    """Matrix product for 1-D and 2-D operands (numpy semantics)."""
    a, b = constant(a), constant(b)
    if a.data.ndim not in (1, 2) or b.data.ndim not in (1, 2) or a.shape[-1] != b.shape[0]:
        raise ShapeError(f"matmul: incompatible shapes {a.shape} @ {b.shape}")
    A, B = a.data, b.data

    def vjp(g):
        if A.ndim == 2 and B.ndim == 2:
            return g @ B.T, A.T @ g
        if A.ndim == 1 and B.ndim == 2:
            return B @ g, np.outer(A, g)
        if A.ndim == 2:
            return np.outer(g, B), A.T @ g
        return g * B, g * A

    return emit("matmul", (a, b), A @ B, vjp)


def add(a: Operand, b: Operand) -> Tensor:
    a, b = constant(a), constant(b)
    _check_broadcast("add", a, b)
    sa, sb = a.shape, b.shape
    return emit("add", (a, b), a.data + b.data, lambda g: (_unbroadcast(g, sa), _unbroadcast(g, sb)))


def mul(a: Operand, b: Operand) -> Tensor:
    a, b = constant(a), constant(b)
    _check_broadcast("mul", a, b)
    A, B = a.data, b.data
    return emit("mul", (a, b), A * B, lambda g: (_unbroadcast(g * B, A.shape), _unbroadcast(g * A, B.shape)))


def neg(a: Operand) -> Tensor:
    return mul(a, -1.0)


def sub(a: Operand, b: Operand) -> Tensor:
    return add(a, neg(b))


def tanh(a: Operand) -> Tensor:
    a = constant(a)
    y = np.tanh(a.data)
    return emit("tanh", (a,), y, lambda g: (g * (1.0 - y * y),))


def sigmoid(a: Operand) -> Tensor:
    a = constant(a)
    y = 0.5 * (1.0 + np.tanh(0.5 * a.data))
    return emit("sigmoid", (a,), y, lambda g: (g * y * (1.0 - y),))


def relu(a: Operand) -> Tensor:
    a = constant(a)
    mask = a.data > 0
    return emit("relu", (a,), np.where(mask, a.data, 0.0), lambda g: (g * mask,))


def exp(a: Operand) -> Tensor:
    a = constant(a)
    y = np.exp(a.data)
    return emit("exp", (a,), y, lambda g: (g * y,))


def log(a: Operand) -> Tensor:
    a = constant(a)
    x = a.data
    if np.any(x <= 0):
        raise NumericError(f"log of non-positive value (min {x.min():.3e})")
    return emit("log", (a,), np.log(x), lambda g: (g / x,))


def softmax(logits: Operand) -> Tensor:
    """
    Softmax along the last axis, computed with max-subtraction.

    Raises:
        NumericError: logits contain NaN or infinity.
    """
    t = constant(logits)
    if not np.all(np.isfinite(t.data)):
        raise NumericError("softmax input contains non-finite values")
    shifted = t.data - t.data.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    s = e / e.sum(axis=-1, keepdims=True)
    return emit("softmax", (t,), s, lambda g: (s * (g - (g * s).sum(axis=-1, keepdims=True)),))


def log_softmax(logits: Operand) -> Tensor:
    """
    Log of the softmax along the last axis as logits - logsumexp(logits). Finite for any
    finite logits, so letter log-probabilities never underflow to log(0).

    Raises:
        NumericError: logits contain NaN or infinity.
    """
    t = constant(logits)
    if not np.all(np.isfinite(t.data)):
        raise NumericError("log_softmax input contains non-finite values")
    shifted = t.data - t.data.max(axis=-1, keepdims=True)
    y = shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
    s = np.exp(y)
    return emit("log_softmax", (t,), y, lambda g: (g - s * g.sum(axis=-1, keepdims=True),))


def concat(tensors: Sequence[Operand], axis: int = 0) -> Tensor:
    parts = tuple(constant(t) for t in tensors)
    if not parts:
        raise ShapeError("concat needs at least one tensor")
    try:
        out = np.concatenate([p.data for p in parts], axis=axis)
    except ValueError as e:
        raise ShapeError(f"concat: {e}") from None
    bounds = np.cumsum([p.shape[axis] for p in parts])[:-1]
    return emit("concat", parts, out, lambda g: tuple(np.split(g, bounds, axis=axis)))


def stack(tensors: Sequence[Operand]) -> Tensor:
    """Concatenate equally shaped tensors along a new leading axis."""
    parts = tuple(constant(t) for t in tensors)
    if not parts:
        raise ShapeError("stack needs at least one tensor")
    if len({p.shape for p in parts}) != 1:
        raise ShapeError(f"stack: shapes differ: {[p.shape for p in parts]}")
    out = np.stack([p.data for p in parts], axis=0)
    return emit("stack", parts, out, lambda g: tuple(g[i] for i in range(len(parts))))


def lookup(table: Operand, index: int) -> Tensor:
    """Row lookup: table[index] (an embedding row, a matrix row, or a vector entry)."""
    table = constant(table)
    index = int(index)
    if not 0 <= index < table.shape[0]:
        raise ShapeError(f"lookup index {index} out of range for {table.shape[0]} rows")
    shape = table.shape

    def vjp(g):
        full = np.zeros(shape)
        full[index] = g
        return (full,)

    return emit("lookup", (table,), table.data[index], vjp)


def gather_rows(table: Operand, index) -> Tensor:
    """
    Row gather over a 2-D table: output row k is table[index[k, 0]], ..., table[index[k, -1]]
    concatenated, giving shape (len(index), index.shape[1] * columns).
    """
    table = constant(table)
    index = np.asarray(index, dtype=np.int64)
    if len(table.shape) != 2 or index.ndim != 2:
        raise ShapeError(f"gather_rows needs a 2-D table and index, got {table.shape} and {index.shape}")
    if index.size and (index.min() < 0 or index.max() >= table.shape[0]):
        raise ShapeError(f"gather_rows index out of range for {table.shape[0]} rows")
    shape = table.shape

    def vjp(g):
        full = np.zeros(shape)
        np.add.at(full, index, g.reshape(index.shape + (shape[1],)))
        return (full,)

    return emit("gather_rows", (table,), table.data[index].reshape(index.shape[0], -1), vjp)


def reduce_sum(a: Operand, axis=None) -> Tensor:
    a = constant(a)
    shape = a.shape

    def vjp(g):
        if axis is not None:
            g = np.expand_dims(g, axis)
        return (np.array(np.broadcast_to(g, shape)),)

    return emit("sum", (a,), np.sum(a.data, axis=axis), vjp)


def reduce_mean(a: Operand, axis=None) -> Tensor:
    a = constant(a)
    count = a.size if axis is None else a.shape[axis]
    return mul(reduce_sum(a, axis=axis), 1.0 / count)


def clamp(a: Operand, lo: float, hi: float) -> Tensor:
    """Clamp to [lo, hi], composed as lo + relu(a - lo) - relu(a - hi)."""
    if lo >= hi:
        raise ValueError(f"clamp needs lo < hi, got [{lo}, {hi}]")
    return sub(add(relu(sub(a, lo)), lo), relu(sub(a, hi)))


# Reductions are exported under the short names used throughout the codebase
sum = reduce_sum
mean = reduce_mean
