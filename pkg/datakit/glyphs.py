"""
Handshape glyph templates.

Each letter is a palm with five fingers; finger i is extended when bit i of
(letter index + 1) is set and folded otherwise, so every letter of a 26-letter
alphabet gets a distinct finger pattern.
"""

import math
from functools import lru_cache

import numpy as np
from PIL import Image, ImageDraw

PALM_LEVEL = 150
FINGER_LEVEL = 255
NUM_FINGERS = 5


def finger_pattern(letter_index: int) -> tuple:
    code = letter_index + 1
    return tuple(bool(code >> bit & 1) for bit in range(NUM_FINGERS))


@lru_cache(maxsize=512)
def _glyph(letter_index: int, size: int, thickness: int) -> np.ndarray:
    scale = size / 64.0
    image = Image.new("L", (size, size), 0)
    draw = ImageDraw.Draw(image)

    cx, cy = size / 2.0, size * 0.62
    rx, ry = 13 * scale, 11 * scale
    draw.ellipse([cx - rx, cy - ry, cx + rx, cy + ry], fill=PALM_LEVEL)

    width = max(1, round(thickness * scale))
    # Fingers fan out over the top of the palm; the thumb (finger 0) sits low on the left.
    angles = (-150.0, -115.0, -95.0, -75.0, -55.0)
    for finger, extended in enumerate(finger_pattern(letter_index)):
        angle = math.radians(angles[finger])
        base = (cx + rx * 0.9 * math.cos(angle), cy + ry * 0.9 * math.sin(angle))
        length = (22 if extended else 6) * scale
        tip = (base[0] + length * math.cos(angle), base[1] + length * math.sin(angle))
        draw.line([base, tip], fill=FINGER_LEVEL, width=width)

    glyph = np.asarray(image, dtype=np.float64) / 255.0
    glyph.setflags(write=False)
    return glyph


def letter_glyph(letter_index: int, size: int = 64, thickness: int = 3) -> np.ndarray:
    """
    Read-only (size, size) template in [0, 1] for a letter index.

    Raises:
        ValueError: negative index, index beyond the 5-finger code space, or a non-positive size/thickness.
    """
    if not 0 <= letter_index < 2 ** NUM_FINGERS - 1:
        raise ValueError(f"letter index out of range: {letter_index}")
    if size < 8 or thickness < 1:
        raise ValueError(f"size must be >= 8 and thickness >= 1, got {size}, {thickness}")
    return _glyph(letter_index, size, thickness)
