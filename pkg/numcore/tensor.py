"""
Tensor and Tape: the recording half of reverse-mode differentiation.

A Tensor wraps a read-only float64 numpy array. Primitive ops (numcore.ops) append a
TapeRecord to the active Tape whenever any operand requires a gradient; backprop
replays the records in reverse.
"""

import contextvars
import logging
from dataclasses import dataclass
from typing import Callable, Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from common.errors import NumericError, ShapeError

logger = logging.getLogger(__name__)

VJP = Callable[[np.ndarray], Tuple[Optional[np.ndarray], ...]]

_active_tape: contextvars.ContextVar[Optional["Tape"]] = contextvars.ContextVar("active_tape", default=None)


class Tensor:
    """
    Immutable dense tensor of 64-bit floats.

    requires_grad marks leaves (parameters) and every value computed from them while a
    Tape is active.
    """

    __slots__ = ("data", "name", "requires_grad")

    def __init__(self, data, name: Optional[str] = None, requires_grad: bool = False):
        arr = np.array(data, dtype=np.float64)
        if any(dim < 1 for dim in arr.shape):
            raise ShapeError(f"Tensor {name or ''} has a zero-sized dimension: shape {arr.shape}")
        arr.flags.writeable = False
        self.data = arr
        self.name = name
        self.requires_grad = requires_grad

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        if self.data.size != 1:
            raise ShapeError(f"item() needs a single-element tensor, got shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        return self.data

    def detach(self) -> "Tensor":
        return Tensor(self.data, name=self.name)

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"Tensor{label}(shape={self.shape}, requires_grad={self.requires_grad})"

    # Operator sugar routes through the primitives so composed expressions are recorded
    def __add__(self, other):
        from numcore import ops
        return ops.add(self, other)

    def __radd__(self, other):
        from numcore import ops
        return ops.add(other, self)

    def __sub__(self, other):
        from numcore import ops
        return ops.sub(self, other)

    def __rsub__(self, other):
        from numcore import ops
        return ops.sub(other, self)

    def __mul__(self, other):
        from numcore import ops
        return ops.mul(self, other)

    def __rmul__(self, other):
        from numcore import ops
        return ops.mul(other, self)

    def __matmul__(self, other):
        from numcore import ops
        return ops.matmul(self, other)

    def __neg__(self):
        from numcore import ops
        return ops.neg(self)


def constant(value) -> Tensor:
    """Wrap a value as a Tensor that never receives a gradient."""
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


@dataclass(frozen=True)
class TapeRecord:
    op: str
    inputs: Tuple[Tensor, ...]
    output: Tensor
    vjp: VJP


class Tape:
    """
    Ordered record of primitive operations applied during a forward pass.

    Use as a context manager; ops executed inside the block are recorded on it.
    Records are appended in execution order, which is a topological order of the graph.
    """

    def __init__(self):
        self.records: list[TapeRecord] = []
        self._token = None

    def __enter__(self) -> "Tape":
        self._token = _active_tape.set(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        _active_tape.reset(self._token)
        self._token = None
        return False

    def __len__(self) -> int:
        return len(self.records)

    def record(self, op: str, inputs: Sequence[Tensor], output: Tensor, vjp: VJP) -> None:
        self.records.append(TapeRecord(op, tuple(inputs), output, vjp))


def active_tape() -> Optional[Tape]:
    return _active_tape.get()


def emit(op: str, inputs: Sequence[Tensor], out: np.ndarray, vjp: VJP) -> Tensor:
    """Wrap an op result, check it is finite, and record it when it depends on a parameter."""
    if not np.all(np.isfinite(out)):
        raise NumericError(f"{op} produced non-finite values (shape {np.shape(out)})")
    requires_grad = any(t.requires_grad for t in inputs)
    tape = _active_tape.get()
    result = Tensor(out, requires_grad=requires_grad and tape is not None)
    if tape is not None and requires_grad:
        tape.record(op, inputs, result, vjp)
    return result


def backprop(loss: Tensor, tape: Tape, params: Optional[Mapping[str, Tensor]] = None) -> Dict[str, np.ndarray]:
    """
    Reverse-mode sweep over the tape from a scalar loss.

    Returns a gradient per entry of params (zeros for parameters that did not take part
    in the forward pass). Without params, gradients are keyed by tensor name for every
    named leaf that received one.

    Raises:
        ShapeError: loss is not a scalar.
    """
    if loss.size != 1:
        raise ShapeError(f"backprop needs a scalar loss, got shape {loss.shape}")

    grads: Dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
    leaves: Dict[int, Tensor] = {}

    for record in reversed(tape.records):
        upstream = grads.pop(id(record.output), None)
        if upstream is None:
            continue
        input_grads = record.vjp(upstream)
        for tensor, grad in zip(record.inputs, input_grads):
            if grad is None or not tensor.requires_grad:
                continue
            if grad.shape != tensor.shape:
                raise ShapeError(f"{record.op}: gradient shape {grad.shape} does not match operand {tensor.shape}")
            key = id(tensor)
            if key in grads:
                grads[key] = grads[key] + grad
            else:
                grads[key] = grad
                leaves[key] = tensor

    if params is None:
        return {t.name: grads[k] for k, t in leaves.items() if t.name is not None and k in grads}

    return {
        name: grads.get(id(t), np.zeros_like(t.data)) for name, t in params.items()
    }
