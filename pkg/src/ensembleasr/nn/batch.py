"""Zero-padded batch container for variable-length frame sequences."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import EmptyInput, MaskShapeMismatch, ShapeMismatch


@dataclass
class PaddedBatch:
    """values: (batch, max_frames, width); frame_mask true for real frames.

    Padded positions hold zeros on input so downstream kernels can rely on
    multiplication by the mask being a no-op for real frames.
    """

    values: np.ndarray
    frame_mask: np.ndarray
    lengths: np.ndarray  # (batch,) int

    @property
    def batch_size(self) -> int:
        return self.values.shape[0]

    @property
    def max_frames(self) -> int:
        return self.values.shape[1]

    @property
    def width(self) -> int:
        return self.values.shape[2]

    def validate(self) -> None:
        if self.values.ndim != 3:
            raise ShapeMismatch(f"batch values must be 3-d, got shape {self.values.shape}")
        B, T, _ = self.values.shape
        if self.frame_mask.shape != (B, T):
            raise MaskShapeMismatch(
                f"frame mask shape {self.frame_mask.shape} does not match values {self.values.shape}"
            )
        if self.lengths.shape != (B,):
            raise ShapeMismatch(f"lengths must have shape ({B},), got {self.lengths.shape}")
        expected = np.arange(T)[None, :] < self.lengths[:, None]
        if not np.array_equal(self.frame_mask, expected):
            raise MaskShapeMismatch("frame mask must be true exactly below each item's length")
        if np.any(self.values[~self.frame_mask] != 0):
            raise ShapeMismatch("padded positions must hold zeros")


def pad_batch(items: Sequence[np.ndarray], dtype=np.float32) -> PaddedBatch:
    """Stack (frames_i, width) matrices into one zero-padded batch."""
    if not items:
        raise EmptyInput("cannot batch zero items")
    widths = {m.shape[1] for m in items}
    if len(widths) != 1:
        raise ShapeMismatch(f"all items must share one width, got {sorted(widths)}")
    lengths = np.array([m.shape[0] for m in items], dtype=np.int64)
    T = int(lengths.max()) if len(lengths) else 0
    B = len(items)
    values = np.zeros((B, T, widths.pop()), dtype=dtype)
    for i, m in enumerate(items):
        values[i, : m.shape[0]] = m
    mask = np.arange(T)[None, :] < lengths[:, None]
    return PaddedBatch(values=values, frame_mask=mask, lengths=lengths)
