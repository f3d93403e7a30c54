"""Adam optimizer and gradient clipping."""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Mapping, Tuple

import numpy as np

from common.errors import ShapeError
from .tensor import Tensor

logger = logging.getLogger(__name__)


@dataclass
class AdamState:
    """Per-parameter moment estimates plus the shared step counter and hyperparameters."""
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def create(cls, params: Mapping[str, Tensor], lr: float = 0.001, **hyper) -> "AdamState":
        return cls(
            lr=lr,
            m={name: np.zeros(t.shape) for name, t in params.items()},
            v={name: np.zeros(t.shape) for name, t in params.items()},
            **hyper,
        )


def adam_step(params: Mapping[str, Tensor], grads: Mapping[str, np.ndarray],
              state: AdamState) -> Tuple[Dict[str, Tensor], AdamState]:
    """
    One bias-corrected Adam update.

    Only parameters present in grads are updated; the rest are passed through, which is
    how frozen parameter groups are expressed. The state is updated in place and returned.

    Raises:
        ShapeError: a gradient or moment shape disagrees with its parameter.
    """
    for name, g in grads.items():
        if name not in params:
            raise ShapeError(f"gradient for unknown parameter '{name}'")
        shape = params[name].shape
        if g.shape != shape:
            raise ShapeError(f"gradient for '{name}' has shape {g.shape}, parameter has {shape}")
        if name in state.m and state.m[name].shape != shape:
            raise ShapeError(f"Adam moments for '{name}' have shape {state.m[name].shape}, parameter has {shape}")

    state.step += 1
    t = state.step
    correction1 = 1.0 - state.beta1 ** t
    correction2 = 1.0 - state.beta2 ** t

    updated: Dict[str, Tensor] = {}
    for name, param in params.items():
        if name not in grads:
            updated[name] = param
            continue
        g = grads[name]
        m = state.m.get(name, np.zeros(param.shape))
        v = state.v.get(name, np.zeros(param.shape))
        m = state.beta1 * m + (1.0 - state.beta1) * g
        v = state.beta2 * v + (1.0 - state.beta2) * g * g
        state.m[name], state.v[name] = m, v
        m_hat = m / correction1
        v_hat = v / correction2
        new_value = param.data - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
        updated[name] = Tensor(new_value, name=param.name, requires_grad=True)
    return updated, state


def clip_by_global_norm(grads: Mapping[str, np.ndarray], max_norm: float) -> Tuple[Dict[str, np.ndarray], float]:
    """Scale all gradients so their joint L2 norm is at most max_norm (0 disables)."""
    norm = math.sqrt(float(np.sum([np.sum(g * g) for g in grads.values()]))) if grads else 0.0
    if max_norm <= 0 or norm <= max_norm:
        return dict(grads), norm
    scale = max_norm / norm
    logger.debug(f"Clipping gradients: norm {norm:.3f} > {max_norm}")
    return {name: g * scale for name, g in grads.items()}, norm
