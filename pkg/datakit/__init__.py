"""
Synthetic fingerspelling data: glyphs, signer styles, augmentation, windowing,
protocol splits and dataset manifests.
"""

from .glyphs import letter_glyph, finger_pattern
from .synth import (
    FRAME_SIZE,
    SignerStyle,
    FrameSequence,
    synth_generate,
    sequence_length,
    unlabeled_styles,
    make_unlabeled_pool,
)
from .augment import TransformSpec, standard_transforms, augment, augment_sequence, make_augmented_set
from .windowing import window_frames, window_index
from .dataset import WordInstance, make_word_list, make_dataset
from .splits import PROTOCOLS, SD_FOLDS, ExperimentSplit, make_splits
from .data_source import FrameSource, SyntheticFrameSource, ManifestFrameSource, create_frame_source
from .manifest import write_dataset, read_manifest, load_frames, manifest_config

__all__ = [
    "letter_glyph", "finger_pattern", "FRAME_SIZE", "SignerStyle", "FrameSequence", "synth_generate",
    "sequence_length", "unlabeled_styles", "make_unlabeled_pool", "TransformSpec", "standard_transforms",
    "augment", "augment_sequence", "make_augmented_set", "window_frames", "window_index", "WordInstance", "make_word_list",
    "make_dataset", "PROTOCOLS", "SD_FOLDS", "ExperimentSplit", "make_splits", "FrameSource",
    "SyntheticFrameSource", "ManifestFrameSource", "create_frame_source", "write_dataset", "read_manifest",
    "load_frames", "manifest_config",
]
