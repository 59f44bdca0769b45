"""Elementary kernels with exact backward passes.

Every forward returns ``(output, cache)``; the matching backward consumes the
cache and the upstream gradient and returns exact adjoints. Kernels follow
the dtype of their inputs so the same code runs in float32 (production) and
float64 (finite-difference verification).
"""

from __future__ import annotations

import numpy as np

from ..errors import ShapeMismatch


def linear_forward(x: np.ndarray, W: np.ndarray, b: np.ndarray):
    """y = x @ W + b over the last axis."""
    if x.shape[-1] != W.shape[0]:
        raise ShapeMismatch(f"linear: input width {x.shape[-1]} vs weight {W.shape}")
    if b.shape != (W.shape[1],):
        raise ShapeMismatch(f"linear: bias shape {b.shape} vs weight {W.shape}")
    return x @ W + b, (x, W)


def linear_backward(cache, grad_y: np.ndarray):
    x, W = cache
    if grad_y.shape != x.shape[:-1] + (W.shape[1],):
        raise ShapeMismatch(f"linear backward: grad shape {grad_y.shape}")
    grad_x = grad_y @ W.T
    x2 = x.reshape(-1, x.shape[-1])
    g2 = grad_y.reshape(-1, grad_y.shape[-1])
    grad_W = x2.T @ g2
    grad_b = g2.sum(axis=0)
    return grad_x, grad_W, grad_b


def layer_norm_forward(x: np.ndarray, gain: np.ndarray, shift: np.ndarray, eps: float = 1e-5):
    """Normalize each frame over the last axis, then scale and shift."""
    if gain.shape != (x.shape[-1],) or shift.shape != (x.shape[-1],):
        raise ShapeMismatch(
            f"layer_norm: gain {gain.shape} / shift {shift.shape} vs width {x.shape[-1]}"
        )
    mu = x.mean(axis=-1, keepdims=True)
    var = np.square(x - mu).mean(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + eps)
    xhat = (x - mu) * inv_std
    y = xhat * gain + shift
    return y, (xhat, inv_std, gain)


def layer_norm_backward(cache, grad_y: np.ndarray):
    xhat, inv_std, gain = cache
    grad_gain = np.sum(grad_y * xhat, axis=tuple(range(grad_y.ndim - 1)))
    grad_shift = np.sum(grad_y, axis=tuple(range(grad_y.ndim - 1)))
    gxhat = grad_y * gain
    grad_x = inv_std * (
        gxhat
        - gxhat.mean(axis=-1, keepdims=True)
        - xhat * np.mean(gxhat * xhat, axis=-1, keepdims=True)
    )
    return grad_x, grad_gain, grad_shift


def relu_forward(x: np.ndarray):
    return np.maximum(x, 0), (x > 0)


def relu_backward(cache, grad_y: np.ndarray):
    return grad_y * cache


def dropout_forward(x: np.ndarray, rate: float, uniforms: np.ndarray | None):
    """Inverted dropout; a no-op when rate is 0 or no random draws are given."""
    if rate <= 0 or uniforms is None:
        return x, None
    keep = (uniforms.reshape(x.shape) >= rate).astype(x.dtype) / (1.0 - rate)
    return x * keep, keep


def dropout_backward(cache, grad_y: np.ndarray):
    return grad_y if cache is None else grad_y * cache
