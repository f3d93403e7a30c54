"""
Binary checkpoints.

Layout (all integers little-endian):
    magic b"FSPK" | u32 version | u32 header length | header (UTF-8 JSON)
    per tensor, in header order: u64 value count | values as float64
    u32 CRC32 of everything before it
The header carries the model config, seeds, extra metadata and every tensor's name and shape.
"""

import json
import logging
import os
import struct
import zlib
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Mapping, Optional

import numpy as np

from common.config import ModelConfig
from common.errors import (
    CheckpointMismatchError,
    CheckpointVersionError,
    CorruptCheckpointError,
)
from numcore import Tensor
from seq2seq import param_shapes

logger = logging.getLogger(__name__)

MAGIC = b"FSPK"
VERSION = 1
_PREFIX = struct.Struct("<4sII")
_COUNT = struct.Struct("<Q")
_CRC = struct.Struct("<I")


@dataclass
class Checkpoint:
    model: ModelConfig
    params: Dict[str, np.ndarray]
    seeds: Dict[str, int] = field(default_factory=dict)
    meta: Dict[str, Any] = field(default_factory=dict)
    version: int = VERSION

    def tensors(self) -> Dict[str, Tensor]:
        return {name: Tensor(value, name=name, requires_grad=True) for name, value in self.params.items()}


def _as_array(value) -> np.ndarray:
    return np.asarray(value.data if isinstance(value, Tensor) else value, dtype=np.float64)


def save_checkpoint(path: str, params: Mapping[str, Any], model: ModelConfig,
                    seeds: Optional[Mapping[str, int]] = None, meta: Optional[Mapping[str, Any]] = None) -> str:
    """Write a checkpoint atomically (temp file then rename). Returns path."""
    arrays = {name: _as_array(value) for name, value in sorted(params.items())}
    header = {
        "model": asdict(model),
        "seeds": dict(seeds or {}),
        "meta": dict(meta or {}),
        "tensors": [{"name": name, "shape": list(a.shape)} for name, a in arrays.items()],
    }
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    body = bytearray(_PREFIX.pack(MAGIC, VERSION, len(header_bytes)))
    body += header_bytes
    for a in arrays.values():
        body += _COUNT.pack(a.size)
        body += a.astype("<f8").tobytes(order="C")
    body += _CRC.pack(zlib.crc32(body))

    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(body)
    os.replace(tmp, path)
    logger.info(f"Saved checkpoint with {len(arrays)} tensors to {path}")
    return path


def load_checkpoint(path: str, expected: Optional[ModelConfig] = None) -> Checkpoint:
    """
    Raises:
        CorruptCheckpointError: unreadable, truncated or checksum mismatch.
        CheckpointVersionError: written by an unsupported format version.
        CheckpointMismatchError: architecture differs from expected.
    """
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as e:
        raise CorruptCheckpointError(f"Cannot read checkpoint {path}: {e}") from e

    if len(blob) < _PREFIX.size + _CRC.size:
        raise CorruptCheckpointError(f"{path}: file too short ({len(blob)} bytes)")
    magic, version, header_len = _PREFIX.unpack_from(blob, 0)
    if magic != MAGIC:
        raise CorruptCheckpointError(f"{path}: not a checkpoint (magic {magic!r})")
    if version != VERSION:
        raise CheckpointVersionError(f"{path}: format version {version}, this build reads {VERSION}")
    (stored_crc,) = _CRC.unpack_from(blob, len(blob) - _CRC.size)
    if zlib.crc32(blob[:-_CRC.size]) != stored_crc:
        raise CorruptCheckpointError(f"{path}: checksum mismatch (truncated or modified)")

    try:
        offset = _PREFIX.size
        header = json.loads(blob[offset:offset + header_len].decode("utf-8"))
        offset += header_len
        params: Dict[str, np.ndarray] = {}
        for entry in header["tensors"]:
            (count,) = _COUNT.unpack_from(blob, offset)
            offset += _COUNT.size
            shape = tuple(entry["shape"])
            if count != int(np.prod(shape, dtype=np.int64)) or offset + 8 * count > len(blob) - _CRC.size:
                raise ValueError(f"tensor {entry['name']} has inconsistent size")
            values = np.frombuffer(blob, dtype="<f8", count=count, offset=offset)
            params[entry["name"]] = values.astype(np.float64).reshape(shape)
            offset += 8 * count
        model = ModelConfig(**header["model"])
    except (ValueError, KeyError, TypeError, struct.error) as e:
        raise CorruptCheckpointError(f"{path}: {e}") from e

    checkpoint = Checkpoint(model=model, params=params, seeds=header.get("seeds", {}),
                            meta=header.get("meta", {}), version=version)
    if expected is not None:
        check_architecture(checkpoint, expected)
    return checkpoint


def check_architecture(checkpoint: Checkpoint, expected: ModelConfig) -> None:
    """Raise CheckpointMismatchError unless mode, sizes and parameter shapes agree with expected."""
    differences = {
        key: (value, getattr(expected, key))
        for key, value in asdict(checkpoint.model).items()
        if value != getattr(expected, key)
    }
    if differences:
        detail = ", ".join(f"{k}: checkpoint={a!r} run={b!r}" for k, (a, b) in sorted(differences.items()))
        raise CheckpointMismatchError(f"checkpoint architecture differs from the run ({detail})")

    shapes = param_shapes(expected)
    stored = {name: a.shape for name, a in checkpoint.params.items()}
    if stored != shapes:
        missing = sorted(set(shapes) - set(stored))
        extra = sorted(set(stored) - set(shapes))
        wrong = sorted(n for n in set(shapes) & set(stored) if shapes[n] != stored[n])
        raise CheckpointMismatchError(f"parameter mismatch: missing={missing} unexpected={extra} shape={wrong}")
