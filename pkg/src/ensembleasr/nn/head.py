"""Trainable head over frozen combined features.

Forward: input projection to d_model -> encoder stack -> output linear to
vocabulary logits. With num_layers = 0 this degenerates to a purely linear
head (projection + output layer).
"""

from __future__ import annotations

import numpy as np

from ..errors import ShapeMismatch
from ..rng import RandomStream
from .batch import PaddedBatch
from .encoder import EncoderConfig, encoder_backward, encoder_forward
from .layers import linear_backward, linear_forward
from .params import ParamStore


def head_forward(
    batch: PaddedBatch,
    cfg: EncoderConfig,
    params: ParamStore,
    train_mode: bool = False,
    dropout_stream: RandomStream | None = None,
):
    """Returns (logits of shape (B, T, vocab), cache).

    Logits at padded positions are not meaningful; the loss must mask to each
    item's true length.
    """
    W = params["proj.W"]
    if batch.width != W.shape[0]:
        raise ShapeMismatch(
            f"batch width {batch.width} does not match projection input {W.shape[0]}"
        )
    mask3 = batch.frame_mask[:, :, None]
    h, c_proj = linear_forward(batch.values, W, params["proj.b"])
    h = h * mask3  # keep padded rows at zero (bias would leak otherwise)
    enc, c_enc = encoder_forward(
        h, batch.frame_mask, cfg, params, train_mode=train_mode, dropout_stream=dropout_stream
    )
    logits, c_ctc = linear_forward(enc, params["ctc.W"], params["ctc.b"])
    return logits, (c_proj, c_enc, c_ctc, mask3)


def head_backward(cache, grad_logits: np.ndarray, params: ParamStore) -> np.ndarray:
    """Accumulates parameter gradients into the store; returns the gradient
    at the combined-feature input (zero at padded positions)."""
    c_proj, c_enc, c_ctc, mask3 = cache
    g_enc, gW, gb = linear_backward(c_ctc, grad_logits * mask3)
    params.accumulate("ctc.W", gW)
    params.accumulate("ctc.b", gb)
    g_h = encoder_backward(c_enc, g_enc, params)
    g_x, gWp, gbp = linear_backward(c_proj, g_h * mask3)
    params.accumulate("proj.W", gWp)
    params.accumulate("proj.b", gbp)
    return g_x * mask3
