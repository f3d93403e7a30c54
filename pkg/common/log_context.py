"""
Context-aware logging utilities.
Provides run context (protocol, fold, phase, epoch) for all log messages of a training run.
"""

import contextvars
import logging
from contextlib import contextmanager
from typing import Dict, Iterator, Optional

# Context variable to store the current run context
current_run_context: contextvars.ContextVar[Optional[Dict[str, object]]] = contextvars.ContextVar(
    'current_run_context', default=None
)


def set_run_context(**fields: object) -> None:
    """Merge fields into the run context of the current execution context."""
    merged = dict(current_run_context.get() or {})
    merged.update({k: v for k, v in fields.items() if v is not None})
    current_run_context.set(merged)


def get_run_context() -> Optional[Dict[str, object]]:
    """Get the run context of the current execution context."""
    return current_run_context.get()


def clear_run_context() -> None:
    """Clear the run context."""
    current_run_context.set(None)


@contextmanager
def run_context(**fields: object) -> Iterator[None]:
    """Set run context fields for the duration of a block, restoring the previous context after."""
    token = current_run_context.set(dict(current_run_context.get() or {}))
    try:
        set_run_context(**fields)
        yield
    finally:
        current_run_context.reset(token)


def format_run_context(ctx: Optional[Dict[str, object]]) -> str:
    """
    Render a run context as a log prefix.

    The protocol comes first, then key=value pairs, then the phase:
    {"protocol": "SI", "target": 4, "phase": "train", "epoch": 3} -> "SI/target=4/train/epoch=3 | "
    """
    if not ctx:
        return ""
    parts = []
    if "protocol" in ctx:
        parts.append(str(ctx["protocol"]))
    for key in ("fold", "target", "seed"):
        if key in ctx:
            parts.append(f"{key}={ctx[key]}")
    if "phase" in ctx:
        parts.append(str(ctx["phase"]))
    if "epoch" in ctx:
        parts.append(f"epoch={ctx['epoch']}")
    return "/".join(parts) + " | " if parts else ""


class RunContextFilter(logging.Filter):
    """
    Logging filter that adds the run context to log records.
    This allows automatic inclusion of protocol/fold/epoch in all log messages.
    """

    def filter(self, record: logging.LogRecord) -> bool:
        """Add run_ctx to log record."""
        record.run_ctx = format_run_context(get_run_context())
        return True
