"""
Heatmap images for attention weights and letter confusions.
"""

import io
import logging
from typing import Optional, Sequence

import numpy as np
from PIL import Image, ImageDraw, ImageFont

from .metrics import ConfusionMatrix

logger = logging.getLogger(__name__)

CELL = 18
MARGIN = 28
BACKGROUND = (255, 255, 255)
GRID = (200, 200, 200)
MARK = (220, 30, 30)


def _load_font(font_path: Optional[str], size: int = 11):
    if font_path:
        try:
            return ImageFont.truetype(font_path, size)
        except IOError:
            logger.warning(f"Font not found at '{font_path}', using default")
    return ImageFont.load_default()


def _heatmap(values: np.ndarray, row_labels: Sequence[str], col_labels: Sequence[str],
             font_path: Optional[str], marks: Optional[Sequence[int]] = None) -> bytes:
    rows, cols = values.shape
    width, height = MARGIN + cols * CELL + 1, MARGIN + rows * CELL + 1
    image = Image.new("RGB", (width, height), BACKGROUND)
    draw = ImageDraw.Draw(image)
    font = _load_font(font_path)
    # Bitmap fonts do not support anchors
    anchor = "mm" if isinstance(font, ImageFont.FreeTypeFont) else None

    peak = float(values.max()) if values.size and values.max() > 0 else 1.0
    for r in range(rows):
        for c in range(cols):
            shade = int(round(255 * (1.0 - values[r, c] / peak)))
            x0, y0 = MARGIN + c * CELL, MARGIN + r * CELL
            draw.rectangle([x0, y0, x0 + CELL, y0 + CELL], fill=(shade, shade, 255), outline=GRID)
        if marks is not None:
            cx, cy = MARGIN + marks[r] * CELL + CELL // 2, MARGIN + r * CELL + CELL // 2
            draw.text((cx, cy), "+", fill=MARK, font=font, anchor=anchor)

    for r, label in enumerate(row_labels):
        draw.text((MARGIN // 2, MARGIN + r * CELL + CELL // 2), label, fill="#000000", font=font, anchor=anchor)
    for c, label in enumerate(col_labels):
        draw.text((MARGIN + c * CELL + CELL // 2, MARGIN // 2), label, fill="#000000", font=font, anchor=anchor)

    buf = io.BytesIO()
    image.save(buf, format="PNG")
    return buf.getvalue()


def render_attention_png(alpha, row_labels: Sequence[str], font_path: Optional[str] = None) -> Optional[bytes]:
    """
    PNG heatmap of a T x S attention matrix; each row's most attended frame is marked "+".

    Returns:
        PNG bytes, or None if the matrix is empty or rendering fails.
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.ndim != 2 or alpha.size == 0:
        return None
    try:
        cols = [str(i) for i in range(1, alpha.shape[1] + 1)]
        return _heatmap(alpha, row_labels, cols, font_path, marks=[int(np.argmax(row)) for row in alpha])
    except Exception as e:
        logger.error(f"Failed to render attention heatmap: {e}", exc_info=True)
        return None


def render_confusion_png(matrix: ConfusionMatrix, font_path: Optional[str] = None) -> Optional[bytes]:
    """
    PNG heatmap of the row-normalized confusion matrix with the diagonal dropped so that
    confusions stand out.

    Returns:
        PNG bytes, or None if there are no counts or rendering fails.
    """
    if not matrix.counts.any():
        return None
    try:
        values = matrix.normalized().copy()
        n = len(matrix.labels)
        values[np.arange(n), np.arange(n)] = 0.0
        return _heatmap(values, list(matrix.labels), matrix.axis_labels, font_path)
    except Exception as e:
        logger.error(f"Failed to render confusion heatmap: {e}", exc_info=True)
        return None
