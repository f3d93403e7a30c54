"""
Comma-separated exports of attention weights and confusion matrices.
"""

import csv
import io
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from common.errors import ShapeError
from .metrics import ConfusionMatrix

logger = logging.getLogger(__name__)

ARGMAX_COLUMN = "argmax_frame"


def attention_export(alpha, row_labels: Sequence[str], frame_indices: Optional[Sequence[int]] = None) -> str:
    """
    T x S attention table: one row per decoded symbol, one column per frame (1-based by
    default), and a final column with the frame each row attends to most.

    Raises:
        ShapeError: alpha is not 2-D or the labels do not match its shape.
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.ndim != 2:
        raise ShapeError(f"attention matrix must be 2-D, got shape {alpha.shape}")
    frames = list(frame_indices) if frame_indices is not None else list(range(1, alpha.shape[1] + 1))
    if len(row_labels) != alpha.shape[0] or len(frames) != alpha.shape[1]:
        raise ShapeError(f"labels ({len(row_labels)} x {len(frames)}) do not match attention shape {alpha.shape}")

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["symbol"] + [str(f) for f in frames] + [ARGMAX_COLUMN])
    for label, row in zip(row_labels, alpha):
        writer.writerow([label] + [repr(float(v)) for v in row] + [frames[int(np.argmax(row))]])
    return buf.getvalue()


def parse_attention_table(text: str) -> Tuple[List[str], np.ndarray, List[int]]:
    """Inverse of attention_export: (row labels, T x S matrix, argmax frame per row)."""
    rows = list(csv.reader(io.StringIO(text)))
    labels, values, argmax = [], [], []
    for row in rows[1:]:
        labels.append(row[0])
        values.append([float(v) for v in row[1:-1]])
        argmax.append(int(row[-1]))
    return labels, np.array(values, dtype=np.float64).reshape(len(labels), -1), argmax


def confusion_export(matrix: ConfusionMatrix, normalized: bool = False) -> str:
    """Rows are reference letters (plus the gap row for deletions), columns hypothesized letters plus the gap."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    labels = matrix.axis_labels
    writer.writerow(["reference"] + labels)
    if normalized:
        for label, row in zip(matrix.labels, matrix.normalized()):
            writer.writerow([label] + [f"{v:.6f}" for v in row])
    else:
        for label, row in zip(labels, matrix.counts):
            writer.writerow([label] + [str(int(v)) for v in row])
    return buf.getvalue()
