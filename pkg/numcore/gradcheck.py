"""
Finite-difference gradient checking.

Compares backprop's analytic gradients against central differences for every entry of
every parameter.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, Mapping, Optional

import numpy as np

from common.errors import NonDeterministicLossError, ShapeError
from .tensor import Tape, Tensor, backprop

logger = logging.getLogger(__name__)

LossFn = Callable[[Mapping[str, Tensor]], Tensor]


@dataclass
class GradCheckResult:
    max_rel_error: float
    per_param: Dict[str, float] = field(default_factory=dict)
    worst: Optional[str] = None

    def passed(self, tolerance: float = 1e-4) -> bool:
        return self.max_rel_error < tolerance


def relative_error(analytic: float, numeric: float) -> float:
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-8)


def finite_difference_check(loss_fn: LossFn, params: Mapping[str, Tensor], eps: float = 1e-5,
                            names: Optional[Iterable[str]] = None) -> GradCheckResult:
    """
    Max relative error between analytic and central-difference gradients.

    loss_fn must be deterministic: it is evaluated twice at the unperturbed point and any
    difference is rejected.

    Raises:
        NonDeterministicLossError: repeated evaluation gives a different loss.
        ShapeError: loss_fn does not return a scalar.
    """
    params = dict(params)
    with Tape() as tape:
        loss = loss_fn(params)
    if loss.size != 1:
        raise ShapeError(f"loss_fn must return a scalar, got shape {loss.shape}")
    analytic = backprop(loss, tape, params)

    base = loss.item()
    repeat = loss_fn(params).item()
    if repeat != base:
        raise NonDeterministicLossError(f"loss_fn is not deterministic: {base!r} then {repeat!r}")

    result = GradCheckResult(max_rel_error=0.0)
    for name in (names if names is not None else params.keys()):
        original = params[name]
        flat = original.data.reshape(-1)
        worst = 0.0
        for i in range(flat.size):
            values = flat.copy()
            values[i] = flat[i] + eps
            params[name] = Tensor(values.reshape(original.shape), name=name, requires_grad=True)
            plus = loss_fn(params).item()
            values[i] = flat[i] - eps
            params[name] = Tensor(values.reshape(original.shape), name=name, requires_grad=True)
            minus = loss_fn(params).item()
            numeric = (plus - minus) / (2.0 * eps)
            worst = max(worst, relative_error(float(analytic[name].reshape(-1)[i]), numeric))
        params[name] = original
        result.per_param[name] = worst
        if worst >= result.max_rel_error:
            result.max_rel_error = worst
            result.worst = name
        logger.debug(f"gradcheck {name}: max relative error {worst:.3e}")
    return result
