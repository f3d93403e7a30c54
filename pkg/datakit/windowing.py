"""
Frame windows: each frame concatenated with its neighbours.

Works on raw frame sequences (numpy) and on per-frame feature tensors, where the window
is recorded on the tape so the sequence encoder can train through it.
"""

import numpy as np

import numcore as nc
from numcore import Tensor
from .synth import FrameSequence


def window_index(n: int, w: int) -> np.ndarray:
    """
    (n, w) row indices; row t is t - w//2 .. t + w//2 clipped to [0, n - 1].

    Raises:
        ValueError: w even or < 1.
    """
    if w < 1 or w % 2 == 0:
        raise ValueError(f"window size must be odd and >= 1, got {w}")
    half = w // 2
    return np.clip(np.arange(n)[:, None] + np.arange(-half, half + 1)[None, :], 0, n - 1)


def window_frames(seq, w: int):
    """
    (S, w * D) windows; row t holds frames t - w//2 .. t + w//2 (flattened), with the
    first and last frames replicated past the sequence edges. A Tensor input gives a
    Tensor output.

    Raises:
        ValueError: w even or < 1.
    """
    if isinstance(seq, Tensor):
        return nc.gather_rows(seq, window_index(seq.shape[0], w))
    flat = seq.flat() if isinstance(seq, FrameSequence) else np.asarray(seq, dtype=np.float64)
    flat = flat.reshape(flat.shape[0], -1)
    return flat[window_index(flat.shape[0], w)].reshape(flat.shape[0], w * flat.shape[1])
