"""Binary per-utterance feature files.

Layout (little-endian): magic ``SSLF``, u32 version (1), u16 tag length,
model tag (UTF-8), u32 width, u32 frame count, f32 frame stride in
milliseconds, then the frames x width float32 matrix row-major. This is the
write side only; the consumer package owns the reader.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"SSLF"
VERSION = 1

_HEAD_FIXED = struct.Struct("<4sI")
_HEAD_TAG = struct.Struct("<H")
_HEAD_DIMS = struct.Struct("<IIf")


def write_features(
    path: str | Path, model_tag: str, frame_stride_ms: float, values: np.ndarray
) -> None:
    values = np.ascontiguousarray(values, dtype="<f4")
    if values.ndim != 2 or values.shape[1] < 1:
        raise ValueError(f"feature matrix must be (frames, width>=1), got {values.shape}")
    if not np.all(np.isfinite(values)):
        raise ValueError(f"{path}: non-finite feature values")
    if not model_tag:
        raise ValueError("model tag must be non-empty")
    tag = model_tag.encode("utf-8")
    if len(tag) > 0xFFFF:
        raise ValueError("model tag too long")
    num_frames, dim = values.shape
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(_HEAD_FIXED.pack(MAGIC, VERSION))
        fh.write(_HEAD_TAG.pack(len(tag)))
        fh.write(tag)
        fh.write(_HEAD_DIMS.pack(dim, num_frames, np.float32(frame_stride_ms)))
        fh.write(values.tobytes())
