"""
Geometric augmentation of labeled frames.

Three transform families: scaling by 0.8, a 10-pixel shift in a random
direction, and a rotation by a random angle up to 30 degrees. All act about
the frame centre with bilinear resampling and zero fill.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from skimage import transform

from numcore import rng_for
from .synth import FrameSequence, centered, warp_frame

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TransformSpec:
    scale: float = 1.0
    translate_px: float = 0.0
    max_rotation_deg: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError(f"scale must be positive, got {self.scale}")
        if self.translate_px < 0 or self.max_rotation_deg < 0:
            raise ValueError("translate_px and max_rotation_deg must be >= 0")

    def sample(self, label: object = "frame") -> Optional[transform.AffineTransform]:
        """Draw the random direction and angle; None when the drawn transform is the identity."""
        rng = rng_for(self.seed, "augment", label)
        direction = rng.uniform(0.0, 2.0 * math.pi)
        angle = math.radians(rng.uniform(-self.max_rotation_deg, self.max_rotation_deg))
        shift = (self.translate_px * math.cos(direction), self.translate_px * math.sin(direction))
        if self.scale == 1.0 and angle == 0.0 and shift == (0.0, 0.0):
            return None
        return transform.AffineTransform(scale=(self.scale, self.scale), rotation=angle, translation=shift)


def standard_transforms(seed: int = 0) -> Tuple[TransformSpec, TransformSpec, TransformSpec]:
    """The scale, shift and rotation families."""
    return (
        TransformSpec(scale=0.8, seed=seed),
        TransformSpec(translate_px=10.0, seed=seed),
        TransformSpec(max_rotation_deg=30.0, seed=seed),
    )


def _apply(frame: np.ndarray, tform: Optional[transform.AffineTransform]) -> np.ndarray:
    frame = np.asarray(frame, dtype=np.float64)
    if tform is None:
        return frame.copy()
    return warp_frame(frame, centered(tform, frame.shape[0]))


def augment(frame, spec: TransformSpec, label: object = "frame") -> np.ndarray:
    """Apply one sampled transform to a square frame; output keeps its shape and stays in [0, 1]."""
    return _apply(frame, spec.sample(label))


def augment_sequence(seq: FrameSequence, spec: TransformSpec, label: object = "sequence") -> FrameSequence:
    """Apply the same sampled transform to every frame of a sequence."""
    tform = spec.sample(label)
    frames = np.stack([_apply(frame, tform) for frame in seq.frames])
    return FrameSequence(frames, signer=seq.signer, word=seq.word)


def make_augmented_set(sequences: Sequence[FrameSequence], n_frames: int, seed: int) -> List[FrameSequence]:
    """
    Augmented replicates of labeled sequences until their total frame count reaches n_frames.

    Replicates cycle through the sequences and, for each pass, through the three
    transform families, so the set can be sized to match an unlabeled pool.
    """
    if not sequences:
        raise ValueError("no sequences to augment")
    if n_frames < 1:
        raise ValueError(f"n_frames must be >= 1, got {n_frames}")
    families = standard_transforms(seed)
    out: List[FrameSequence] = []
    total = 0
    replicate = 0
    while total < n_frames:
        seq = sequences[replicate % len(sequences)]
        spec = families[(replicate // len(sequences)) % len(families)]
        out.append(augment_sequence(seq, spec, label=("replicate", replicate)))
        total += len(out[-1])
        replicate += 1
    logger.info(f"Built {len(out)} augmented replicates with {total} frames")
    return out
