"""Multi-head scaled dot-product self-attention with padding masks.

Padded key positions get zero attention weight (their scores are masked out
before the softmax), fully-masked query rows produce zero output, and output
rows at padded positions are zeroed, so real-frame outputs are invariant to
whatever values the padding holds.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import MaskShapeMismatch, ShapeMismatch
from .layers import linear_backward, linear_forward


def _split_heads(x: np.ndarray, num_heads: int) -> np.ndarray:
    B, T, D = x.shape
    return x.reshape(B, T, num_heads, D // num_heads).transpose(0, 2, 1, 3)


def _merge_heads(x: np.ndarray) -> np.ndarray:
    B, H, T, dh = x.shape
    return x.transpose(0, 2, 1, 3).reshape(B, T, H * dh)


def _masked_softmax(scores: np.ndarray, key_mask: np.ndarray) -> np.ndarray:
    """Softmax over the last axis with masked keys excluded.

    ``key_mask`` broadcasts over (B, H, Tq, Tk); rows with no valid key come
    out as all zeros rather than NaN.
    """
    neg = np.where(key_mask, scores, -np.inf)
    m = neg.max(axis=-1, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    e = np.exp(neg - m) * key_mask
    denom = e.sum(axis=-1, keepdims=True)
    return e / np.where(denom == 0, 1.0, denom)


def mha_forward(
    x: np.ndarray,
    frame_mask: np.ndarray,
    weights: dict[str, np.ndarray],
    num_heads: int,
):
    """Self-attention over (B, T, d_model) with boolean (B, T) frame mask.

    ``weights`` holds Wq/bq/Wk/bk/Wv/bv/Wo/bo. Returns (output, cache).
    """
    if x.ndim != 3:
        raise ShapeMismatch(f"attention input must be (B, T, D), got {x.shape}")
    B, T, D = x.shape
    if D % num_heads != 0:
        raise ShapeMismatch(f"d_model {D} not divisible by {num_heads} heads")
    if frame_mask.shape != (B, T):
        raise MaskShapeMismatch(f"frame mask {frame_mask.shape} vs input {x.shape}")

    q, cq = linear_forward(x, weights["Wq"], weights["bq"])
    k, ck = linear_forward(x, weights["Wk"], weights["bk"])
    v, cv = linear_forward(x, weights["Wv"], weights["bv"])

    qh = _split_heads(q, num_heads)  # (B, H, T, dh)
    kh = _split_heads(k, num_heads)
    vh = _split_heads(v, num_heads)

    dh = D // num_heads
    scale = 1.0 / math.sqrt(dh)
    scores = (qh @ kh.transpose(0, 1, 3, 2)) * scale  # (B, H, T, T)
    key_mask = frame_mask[:, None, None, :]
    attn = _masked_softmax(scores, key_mask)  # zero weight on padded keys

    ctx = _merge_heads(attn @ vh)  # (B, T, D)
    out, co = linear_forward(ctx, weights["Wo"], weights["bo"])
    out = out * frame_mask[:, :, None]

    cache = (cq, ck, cv, co, qh, kh, vh, attn, frame_mask, num_heads, scale)
    return out, cache


def mha_backward(cache, grad_out: np.ndarray):
    """Adjoint of ``mha_forward``; returns (grad_x, weight gradients)."""
    cq, ck, cv, co, qh, kh, vh, attn, frame_mask, num_heads, scale = cache
    grad_out = grad_out * frame_mask[:, :, None]  # outputs at padding were zeroed

    gctx, gWo, gbo = linear_backward(co, grad_out)
    gctxh = _split_heads(gctx, num_heads)  # (B, H, T, dh)

    gattn = gctxh @ vh.transpose(0, 1, 3, 2)  # (B, H, T, T)
    gvh = attn.transpose(0, 1, 3, 2) @ gctxh

    # softmax backward per query row; masked entries have attn == 0.
    gscores = attn * (gattn - np.sum(gattn * attn, axis=-1, keepdims=True))
    gscores = gscores * scale

    gqh = gscores @ kh
    gkh = gscores.transpose(0, 1, 3, 2) @ qh

    gq = _merge_heads(gqh)
    gk = _merge_heads(gkh)
    gv = _merge_heads(gvh)

    gx_q, gWq, gbq = linear_backward(cq, gq)
    gx_k, gWk, gbk = linear_backward(ck, gk)
    gx_v, gWv, gbv = linear_backward(cv, gv)
    grad_x = gx_q + gx_k + gx_v

    grads = {
        "Wq": gWq, "bq": gbq,
        "Wk": gWk, "bk": gbk,
        "Wv": gWv, "bv": gbv,
        "Wo": gWo, "bo": gbo,
    }
    return grad_x, grads
