"""
Synthetic fingerspelling videos.

A word becomes frames_per_letter jittered copies of each letter glyph with
transition_frames linear cross-fades between consecutive letters:
S = L * frames_per_letter + (L - 1) * transition_frames.
Signers differ by stroke thickness, shear, brightness bias and jitter amplitude.
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
from skimage import transform

from common.config import ALPHABET
from common.errors import DataError
from numcore import rng_for
from .glyphs import letter_glyph

logger = logging.getLogger(__name__)

FRAME_SIZE = 64
PIXEL_NOISE = 0.02


@dataclass(frozen=True)
class SignerStyle:
    signer: int
    thickness: int
    shear: float
    brightness: float
    jitter: float
    seed: int = 0

    @classmethod
    def for_signer(cls, signer: int, seed: int = 0) -> "SignerStyle":
        """Deterministic style for a signer id."""
        rng = rng_for(seed, "signer-style", signer)
        return cls(
            signer=signer,
            thickness=int(rng.integers(2, 5)),
            shear=float(rng.uniform(-0.3, 0.3)),
            brightness=float(rng.uniform(-0.15, 0.1)),
            jitter=float(rng.uniform(0.5, 2.0)),
            seed=seed,
        )


@dataclass(frozen=True)
class FrameSequence:
    frames: np.ndarray
    signer: int
    word: str

    def __post_init__(self):
        frames = np.array(self.frames, dtype=np.float64)
        if frames.ndim != 3 or frames.shape[1] != frames.shape[2]:
            raise DataError(f"frames must have shape (S, size, size), got {frames.shape}")
        if frames.min() < 0.0 or frames.max() > 1.0:
            raise DataError("frame values must lie in [0, 1]")
        if frames.shape[0] < len(self.word):
            raise DataError(f"{frames.shape[0]} frames cannot carry the {len(self.word)} letters of {self.word!r}")
        frames.setflags(write=False)
        object.__setattr__(self, "frames", frames)

    def __len__(self) -> int:
        return self.frames.shape[0]

    @property
    def size(self) -> int:
        return self.frames.shape[1]

    def flat(self) -> np.ndarray:
        """(S, size * size) rows, the layout the feature extractor consumes."""
        return self.frames.reshape(len(self), -1)


def sequence_length(word_len: int, frames_per_letter: int, transition_frames: int) -> int:
    return word_len * frames_per_letter + (word_len - 1) * transition_frames


def check_word(word: str, letters: str = ALPHABET) -> str:
    if not word:
        raise DataError("word must not be empty")
    bad = sorted(set(word) - set(letters))
    if bad:
        raise DataError(f"word {word!r} contains characters outside the alphabet: {bad}")
    return word


def centered(tform: transform.AffineTransform, size: int) -> transform.AffineTransform:
    """Conjugate tform so it acts about the image centre instead of the origin."""
    c = (size - 1) / 2.0
    return (transform.AffineTransform(translation=(-c, -c)) + tform
            + transform.AffineTransform(translation=(c, c)))


def warp_frame(frame: np.ndarray, tform: transform.AffineTransform) -> np.ndarray:
    """Bilinear warp with zero fill outside the source, clipped to [0, 1]."""
    # warp needs a writable buffer; glyphs and stored frames are read-only
    source = np.array(frame, dtype=np.float64)
    out = transform.warp(source, tform.inverse, order=1, mode="constant", cval=0.0, preserve_range=True)
    return np.clip(out, 0.0, 1.0)


def styled_template(letter: str, style: SignerStyle, size: int = FRAME_SIZE, letters: str = ALPHABET) -> np.ndarray:
    """Letter glyph with the signer's thickness, shear and brightness applied."""
    glyph = letter_glyph(letters.index(letter), size, style.thickness)
    sheared = warp_frame(glyph, centered(transform.AffineTransform(shear=style.shear), size))
    return np.clip(sheared * (1.0 + style.brightness), 0.0, 1.0)


def jittered(template: np.ndarray, style: SignerStyle, rng: np.random.Generator) -> np.ndarray:
    """One observed frame: a small random shift of the template plus pixel noise."""
    shift = rng.normal(0.0, style.jitter, size=2)
    frame = warp_frame(template, transform.AffineTransform(translation=tuple(shift)))
    frame = frame + rng.normal(0.0, PIXEL_NOISE, size=frame.shape)
    return np.clip(frame, 0.0, 1.0)


def synth_generate(word: str, style: SignerStyle, frames_per_letter: int, transition_frames: int,
                   seed: int, size: int = FRAME_SIZE) -> FrameSequence:
    """
    Render a word as a frame sequence; fully determined by (word, style, seed).

    Raises:
        DataError: empty word or characters outside the alphabet.
        ValueError: frames_per_letter < 1 or transition_frames < 0.
    """
    check_word(word)
    if frames_per_letter < 1 or transition_frames < 0:
        raise ValueError(f"frames_per_letter must be >= 1 and transition_frames >= 0, "
                         f"got {frames_per_letter}, {transition_frames}")
    rng = rng_for(seed, "synth", style.signer, word)
    templates = [styled_template(letter, style, size) for letter in word]

    frames: List[np.ndarray] = []
    for i, template in enumerate(templates):
        if i > 0:
            previous = templates[i - 1]
            for k in range(1, transition_frames + 1):
                weight = k / (transition_frames + 1)
                frames.append(jittered((1.0 - weight) * previous + weight * template, style, rng))
        frames.extend(jittered(template, style, rng) for _ in range(frames_per_letter))

    logger.debug(f"Rendered {word!r} for signer {style.signer}: {len(frames)} frames")
    return FrameSequence(np.stack(frames), signer=style.signer, word=word)


def unlabeled_styles(n_styles: int, first_signer: int, seed: int = 0) -> List[SignerStyle]:
    """Styles for extra hands, with signer ids starting at first_signer."""
    return [SignerStyle.for_signer(first_signer + i, seed) for i in range(n_styles)]


def make_unlabeled_pool(n_frames: int, styles: Sequence[SignerStyle], seed: int, size: int = FRAME_SIZE,
                        labeled: Sequence[SignerStyle] = ()) -> np.ndarray:
    """
    (n_frames, size, size) frames of random letters from the given styles, without labels.

    Raises:
        ValueError: n_frames < 1 or no styles.
        DataError: a pool style is also a labeled signer's style.
    """
    if n_frames < 1:
        raise ValueError(f"n_frames must be >= 1, got {n_frames}")
    if not styles:
        raise ValueError("at least one style is required")
    overlap = {s.signer for s in styles} & {s.signer for s in labeled}
    if overlap:
        raise DataError(f"unlabeled pool styles overlap labeled signers {sorted(overlap)}")

    rng = rng_for(seed, "unlabeled-pool")
    pool = np.empty((n_frames, size, size))
    for i in range(n_frames):
        style = styles[i % len(styles)]
        letter = ALPHABET[int(rng.integers(len(ALPHABET)))]
        pool[i] = jittered(styled_template(letter, style, size), style, rng)
    logger.info(f"Built unlabeled pool: {n_frames} frames from {len(styles)} styles")
    return pool
