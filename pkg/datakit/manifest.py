"""
Dataset manifests.

manifest.jsonl: a header object (format, frame size, generation parameters) followed by one
object per word instance. Frames of instance i are stored in frames/<i>.f64 as little-endian
float64, frame-major then row-major.
"""

import json
import logging
import os
from dataclasses import asdict, dataclass
from typing import Dict, Iterable, List, Tuple

import numpy as np

from common.config import DataConfig
from common.errors import DataError
from .dataset import WordInstance
from .synth import FrameSequence

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.jsonl"
FRAMES_DIR = "frames"
FORMAT = "fingerspell-manifest/1"
DTYPE = "<f8"


@dataclass(frozen=True)
class ManifestRecord:
    instance: WordInstance
    file: str


def _frame_file(index: int) -> str:
    return os.path.join(FRAMES_DIR, f"{index:06d}.f64")


def write_dataset(directory: str, instances: Iterable[WordInstance], source, config: DataConfig,
                  size: int, store_frames: bool = True) -> str:
    """
    Write the manifest (and, unless store_frames is False, every instance's frames).

    Returns:
        Path of the manifest file.
    """
    os.makedirs(os.path.join(directory, FRAMES_DIR), exist_ok=True)
    path = os.path.join(directory, MANIFEST_NAME)
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        header = {"format": FORMAT, "size": size, "stored": store_frames, "data": asdict(config)}
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for instance in instances:
            record = instance.to_record()
            record["file"] = _frame_file(instance.index) if store_frames else None
            if store_frames:
                seq: FrameSequence = source.frames(instance)
                seq.frames.astype(DTYPE).tofile(os.path.join(directory, record["file"]))
            fh.write(json.dumps(record, sort_keys=True) + "\n")
            count += 1
    logger.info(f"Wrote manifest with {count} instances to {path}")
    return path


def read_manifest(directory: str) -> Tuple[Dict[str, object], List[ManifestRecord]]:
    """
    Raises:
        DataError: missing file, unknown format or a malformed record.
    """
    path = os.path.join(directory, MANIFEST_NAME)
    if not os.path.exists(path):
        raise DataError(f"Manifest not found: {path}")
    with open(path, encoding="utf-8") as fh:
        lines = [line for line in fh if line.strip()]
    try:
        header = json.loads(lines[0])
        if header.get("format") != FORMAT:
            raise DataError(f"Unsupported manifest format: {header.get('format')!r}")
        records = []
        for line in lines[1:]:
            raw = json.loads(line)
            file = raw.pop("file")
            records.append(ManifestRecord(WordInstance(**raw), file))
    except (IndexError, json.JSONDecodeError, TypeError, KeyError) as e:
        raise DataError(f"Malformed manifest {path}: {e}") from e
    return header, records


def manifest_config(meta: Dict[str, object]) -> DataConfig:
    return DataConfig(**meta["data"])


def load_frames(directory: str, record: ManifestRecord, meta: Dict[str, object]) -> FrameSequence:
    """
    Raises:
        DataError: frames not stored, or the stored file size disagrees with the record.
    """
    if not record.file:
        raise DataError(f"Frames of instance {record.instance.index} were not stored")
    size = int(meta["size"])
    data = np.fromfile(os.path.join(directory, record.file), dtype=DTYPE)
    expected = record.instance.num_frames * size * size
    if data.size != expected:
        raise DataError(f"{record.file}: expected {expected} values, found {data.size}")
    frames = data.astype(np.float64).reshape(record.instance.num_frames, size, size)
    return FrameSequence(frames, signer=record.instance.signer, word=record.instance.word)
