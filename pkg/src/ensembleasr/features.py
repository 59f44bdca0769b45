"""Per-utterance embedding matrices and their on-disk binary format.

File layout (little-endian):

==========  =====================================
bytes 0-3   magic ``SSLF`` (ASCII)
bytes 4-7   version, u32 (currently 1)
next        tag_len u16, then tag_len bytes UTF-8 model tag
next        dim u32, num_frames u32, frame_stride_ms f32
payload     num_frames x dim f32 values, frame-major, no padding
==========  =====================================
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    EmptyInput,
    FormatError,
    InvalidMatrix,
    LengthSpreadExceeded,
    StrideMismatch,
)

MAGIC = b"SSLF"
VERSION = 1

_HEAD_FIXED = struct.Struct("<4sI")  # magic, version
_HEAD_TAG = struct.Struct("<H")  # tag length
_HEAD_DIMS = struct.Struct("<IIf")  # dim, num_frames, frame_stride_ms


@dataclass
class FeatureMatrix:
    """Frame-major grid of embedding values for one utterance and one model."""

    model_tag: str
    frame_stride_ms: float
    values: np.ndarray  # (num_frames, dim) float32

    @property
    def num_frames(self) -> int:
        return int(self.values.shape[0])

    @property
    def dim(self) -> int:
        return int(self.values.shape[1])

    def validate(self) -> None:
        if not self.model_tag:
            raise InvalidMatrix("model_tag must be non-empty")
        if self.values.ndim != 2:
            raise InvalidMatrix(f"values must be 2-D, got shape {self.values.shape}")
        if self.dim <= 0:
            raise InvalidMatrix("dim must be positive")
        if not np.isfinite(self.frame_stride_ms) or self.frame_stride_ms <= 0:
            raise InvalidMatrix(f"frame_stride_ms must be > 0, got {self.frame_stride_ms}")
        if not np.all(np.isfinite(self.values)):
            raise InvalidMatrix("values contain NaN or Inf")


def write_features(path: str | Path, fm: FeatureMatrix) -> None:
    """Serialize ``fm`` to ``path``; roundtrips bit-exactly through ``read_features``."""
    fm.validate()
    tag = fm.model_tag.encode("utf-8")
    if len(tag) > 0xFFFF:
        raise InvalidMatrix("model_tag longer than 65535 bytes")
    payload = np.ascontiguousarray(fm.values, dtype="<f4").tobytes()
    with open(path, "wb") as fh:
        fh.write(_HEAD_FIXED.pack(MAGIC, VERSION))
        fh.write(_HEAD_TAG.pack(len(tag)))
        fh.write(tag)
        fh.write(_HEAD_DIMS.pack(fm.dim, fm.num_frames, np.float32(fm.frame_stride_ms)))
        fh.write(payload)


def _parse_header(buf: bytes, path: str | Path) -> tuple[str, int, int, float, int]:
    """Return (tag, dim, num_frames, stride, payload_offset) or raise FormatError."""
    if len(buf) < _HEAD_FIXED.size + _HEAD_TAG.size:
        raise FormatError(f"{path}: truncated header ({len(buf)} bytes)")
    magic, version = _HEAD_FIXED.unpack_from(buf, 0)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}, expected {VERSION}")
    (tag_len,) = _HEAD_TAG.unpack_from(buf, _HEAD_FIXED.size)
    off = _HEAD_FIXED.size + _HEAD_TAG.size
    if len(buf) < off + tag_len + _HEAD_DIMS.size:
        raise FormatError(f"{path}: truncated header ({len(buf)} bytes)")
    tag = buf[off : off + tag_len].decode("utf-8")
    off += tag_len
    dim, num_frames, stride = _HEAD_DIMS.unpack_from(buf, off)
    off += _HEAD_DIMS.size
    return tag, dim, num_frames, stride, off


def read_features(path: str | Path) -> FeatureMatrix:
    """Parse a feature file, rejecting corrupt headers and size mismatches."""
    with open(path, "rb") as fh:
        buf = fh.read()
    tag, dim, num_frames, stride, off = _parse_header(buf, path)
    if dim == 0:
        raise FormatError(f"{path}: declared dim is 0")
    expected = 4 * dim * num_frames
    actual = len(buf) - off
    if actual != expected:
        raise FormatError(
            f"{path}: payload size mismatch, expected {expected} bytes "
            f"({num_frames} x {dim} f32), found {actual}"
        )
    values = np.frombuffer(buf, dtype="<f4", count=dim * num_frames, offset=off)
    values = values.reshape(num_frames, dim).copy()
    if not np.all(np.isfinite(values)):
        raise FormatError(f"{path}: payload contains non-finite values")
    if not (stride > 0) or not np.isfinite(stride):
        raise FormatError(f"{path}: frame_stride_ms must be > 0, got {stride}")
    return FeatureMatrix(model_tag=tag, frame_stride_ms=float(stride), values=values)


def read_feature_header(path: str | Path) -> tuple[str, int, int, float]:
    """Read (model_tag, dim, num_frames, frame_stride_ms) without the payload."""
    with open(path, "rb") as fh:
        buf = fh.read(_HEAD_FIXED.size + _HEAD_TAG.size + 0xFFFF + _HEAD_DIMS.size)
    tag, dim, num_frames, stride, _ = _parse_header(buf, path)
    return tag, dim, num_frames, float(stride)


def align_frames(mats: Sequence[FeatureMatrix], tolerance: int = 2) -> list[FeatureMatrix]:
    """Trim tail frames so all streams share the minimum frame count.

    Streams are assumed to come from the same audio; a spread larger than
    ``tolerance`` frames signals a data bug and is rejected instead of trimmed.
    Dims and strides are untouched; the operation is idempotent.
    """
    if not mats:
        raise EmptyInput("align_frames needs at least one matrix")
    strides = {float(np.float32(m.frame_stride_ms)) for m in mats}
    if len(strides) > 1:
        raise StrideMismatch(f"frame strides differ: {sorted(strides)}")
    lengths = [m.num_frames for m in mats]
    spread = max(lengths) - min(lengths)
    if spread > tolerance:
        raise LengthSpreadExceeded(
            f"frame counts {lengths} spread by {spread} > tolerance {tolerance}"
        )
    tmin = min(lengths)
    return [
        FeatureMatrix(m.model_tag, m.frame_stride_ms, m.values[:tmin])
        for m in mats
    ]
