"""
Frame sources: where the frames of a word instance come from.
"""

from abc import ABC, abstractmethod
from typing import Dict, Optional
import logging

from common.config import DataConfig
from common.errors import DataError
from .dataset import WordInstance
from .manifest import load_frames, read_manifest
from .synth import FRAME_SIZE, FrameSequence, SignerStyle, synth_generate

logger = logging.getLogger(__name__)


class FrameSource(ABC):
    """
    Abstract interface for retrieving the frames of a word instance.
    """

    @abstractmethod
    def frames(self, instance: WordInstance) -> FrameSequence:
        """
        Returns the frame sequence of one word instance.

        Args:
            instance: Dataset record (signer, word, seed, frame count)

        Returns:
            FrameSequence: frames of shape (num_frames, size, size) in [0, 1].

        Raises:
            DataError: If the instance is unknown or its stored frames are inconsistent.
        """
        pass


class SyntheticFrameSource(FrameSource):
    """Regenerates frames from the instance seed and the signer's style."""

    def __init__(self, config: DataConfig, size: int = FRAME_SIZE, style_seed: Optional[int] = None):
        self.config = config
        self.size = size
        self.style_seed = config.data_seed if style_seed is None else style_seed
        self._styles: Dict[int, SignerStyle] = {}

    def style(self, signer: int) -> SignerStyle:
        if signer not in self._styles:
            self._styles[signer] = SignerStyle.for_signer(signer, self.style_seed)
        return self._styles[signer]

    def frames(self, instance: WordInstance) -> FrameSequence:
        seq = synth_generate(instance.word, self.style(instance.signer), self.config.frames_per_letter,
                             self.config.transition_frames, instance.seed, self.size)
        if len(seq) != instance.num_frames:
            raise DataError(f"instance {instance.index} expects {instance.num_frames} frames, generated {len(seq)}")
        return seq


class ManifestFrameSource(FrameSource):
    """Reads frames written by manifest.write_dataset."""

    def __init__(self, directory: str):
        self.directory = directory
        self.meta, records = read_manifest(directory)
        self._records = {record.instance.index: record for record in records}

    @property
    def instances(self):
        return [record.instance for record in self._records.values()]

    def frames(self, instance: WordInstance) -> FrameSequence:
        record = self._records.get(instance.index)
        if record is None or record.instance != instance:
            raise DataError(f"instance {instance.index} is not in the manifest at {self.directory}")
        return load_frames(self.directory, record, self.meta)


def create_frame_source(kind: str, **kwargs) -> FrameSource:
    """
    Factory for frame sources.

    Args:
        kind: "synthetic" (kwargs: config, size, style_seed) or "manifest" (kwargs: directory)
    """
    if kind == "synthetic":
        return SyntheticFrameSource(**kwargs)
    if kind == "manifest":
        return ManifestFrameSource(**kwargs)
    raise ValueError(f"Unknown frame source: {kind}")
