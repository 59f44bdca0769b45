"""Per-frame fusion of aligned multi-model feature streams.

Four strategies over frame-aligned inputs, in canonical manifest model order:

* ``concat`` — stack each frame's vectors end to end (output width = sum).
* ``sum`` — elementwise sum (equal widths required).
* ``weighted`` — convex combination with softmax-normalized learned logits.
* ``attention`` — project every stream to a common width, score each
  projected frame against a learned query (scaled dot product), softmax over
  models per frame, and mix. Gives content-dependent per-frame model weights.

The learnable variants expose exact analytic backward passes so their
parameters can be trained jointly with the head.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimMismatch, EmptyInput, FrameMismatch, InvalidConfig, ShapeMismatch
from .features import FeatureMatrix
from .rng import RandomStream, derive_seed


class CombinerKind(str, enum.Enum):
    CONCAT = "concat"
    SUM = "sum"
    WEIGHTED = "weighted"
    ATTENTION = "attention"


@dataclass
class CombinerParams:
    kind: CombinerKind
    mix_logits: np.ndarray | None = None  # (num_models,), weighted only
    attn_proj: list[np.ndarray] | None = None  # per model (dim_m, d_c), attention only
    attn_query: np.ndarray | None = None  # (d_c,), attention only
    d_c: int | None = None

    def validate(self, dims: Sequence[int]) -> None:
        n = len(dims)
        if self.kind == CombinerKind.WEIGHTED:
            if self.mix_logits is None or self.mix_logits.shape != (n,):
                raise InvalidConfig(f"weighted combiner needs mix_logits of shape ({n},)")
        elif self.kind == CombinerKind.ATTENTION:
            if self.d_c is None or self.d_c < 1:
                raise InvalidConfig("attention combiner needs a positive common width d_c")
            if self.attn_proj is None or len(self.attn_proj) != n:
                raise InvalidConfig(f"attention combiner needs {n} projection matrices")
            for m, (p, d) in enumerate(zip(self.attn_proj, dims)):
                if p.shape != (d, self.d_c):
                    raise DimMismatch(
                        f"projection {m} has shape {p.shape}, expected ({d}, {self.d_c})"
                    )
            if self.attn_query is None or self.attn_query.shape != (self.d_c,):
                raise InvalidConfig(f"attention combiner needs a query of shape ({self.d_c},)")


def combined_dim(kind: CombinerKind, dims: Sequence[int], d_c: int | None = None) -> int:
    """Output width of a combiner over streams with the given widths."""
    if kind == CombinerKind.CONCAT:
        return sum(dims)
    if kind in (CombinerKind.SUM, CombinerKind.WEIGHTED):
        if len(set(dims)) != 1:
            raise DimMismatch(f"{kind.value} combiner needs equal dims, got {list(dims)}")
        return dims[0]
    if d_c is None:
        raise InvalidConfig("attention combiner needs d_c")
    return d_c


def _softmax(x: np.ndarray, axis: int = -1) -> np.ndarray:
    e = np.exp(x - x.max(axis=axis, keepdims=True))
    return e / e.sum(axis=axis, keepdims=True)


def _check_inputs(mats: Sequence[FeatureMatrix], params: CombinerParams) -> list[np.ndarray]:
    if not mats:
        raise EmptyInput("no feature matrices to combine")
    frames = {m.num_frames for m in mats}
    if len(frames) > 1:
        raise FrameMismatch(f"inputs must be frame-aligned, got frame counts {sorted(frames)}")
    params.validate([m.dim for m in mats])
    if params.kind in (CombinerKind.SUM, CombinerKind.WEIGHTED):
        dims = {m.dim for m in mats}
        if len(dims) > 1:
            raise DimMismatch(f"{params.kind.value} combiner needs equal dims, got {sorted(dims)}")
    return [m.values for m in mats]


def combine(mats: Sequence[FeatureMatrix], params: CombinerParams) -> FeatureMatrix:
    """Fuse aligned streams into one; input order is the canonical model order."""
    xs = _check_inputs(mats, params)
    kind = params.kind
    if kind == CombinerKind.CONCAT:
        out = np.concatenate(xs, axis=1)
    elif kind == CombinerKind.SUM:
        out = np.sum(xs, axis=0)
    elif kind == CombinerKind.WEIGHTED:
        w = _softmax(np.asarray(params.mix_logits, dtype=np.float64))
        out = sum(w[m] * x for m, x in enumerate(xs))
        out = out.astype(np.result_type(*[x.dtype for x in xs]))
    else:
        h = np.stack([x @ p for x, p in zip(xs, params.attn_proj)], axis=0)  # (M, T, d_c)
        scores = np.tensordot(h, params.attn_query, axes=([2], [0]))  # (M, T)
        scores = scores / math.sqrt(params.d_c)
        a = _softmax(scores, axis=0)  # (M, T)
        out = np.einsum("mt,mtd->td", a, h)
    tag = "+".join(m.model_tag for m in mats)
    return FeatureMatrix(tag, mats[0].frame_stride_ms, out)


def combine_backward(
    mats: Sequence[FeatureMatrix], params: CombinerParams, grad_out: np.ndarray
) -> tuple[list[np.ndarray], dict[str, np.ndarray]]:
    """Exact adjoint of ``combine``.

    Returns per-input gradients (each input's shape) and parameter gradients
    keyed ``mix_logits`` / ``attn_proj/<m>`` / ``attn_query``; the parameter
    dict is empty for concat and sum.
    """
    xs = _check_inputs(mats, params)
    T = xs[0].shape[0]
    grad_out = np.asarray(grad_out)
    expected = (T, combined_dim(params.kind, [x.shape[1] for x in xs], params.d_c))
    if grad_out.shape != expected:
        raise ShapeMismatch(f"grad_out has shape {grad_out.shape}, expected {expected}")

    kind = params.kind
    if kind == CombinerKind.CONCAT:
        offsets = np.cumsum([0] + [x.shape[1] for x in xs])
        gxs = [grad_out[:, offsets[m] : offsets[m + 1]].copy() for m in range(len(xs))]
        return gxs, {}

    if kind == CombinerKind.SUM:
        return [grad_out.copy() for _ in xs], {}

    if kind == CombinerKind.WEIGHTED:
        w = _softmax(np.asarray(params.mix_logits, dtype=np.float64))
        gxs = [w[m] * grad_out for m in range(len(xs))]
        # d loss / d w_m = <grad_out, x_m>; chain through softmax.
        gw = np.array([float(np.sum(grad_out * x)) for x in xs])
        glogits = w * (gw - float(np.dot(w, gw)))
        return gxs, {"mix_logits": glogits.astype(params.mix_logits.dtype)}

    # attention
    h = np.stack([x @ p for x, p in zip(xs, params.attn_proj)], axis=0)  # (M, T, d_c)
    q = params.attn_query
    scale = 1.0 / math.sqrt(params.d_c)
    scores = np.tensordot(h, q, axes=([2], [0])) * scale  # (M, T)
    a = _softmax(scores, axis=0)  # (M, T)

    ga = np.einsum("td,mtd->mt", grad_out, h)  # d loss / d a
    gscores = a * (ga - np.sum(a * ga, axis=0, keepdims=True))
    gh = a[:, :, None] * grad_out[None, :, :] + gscores[:, :, None] * (q[None, None, :] * scale)
    gq = np.einsum("mt,mtd->d", gscores, h) * scale

    gxs = [gh[m] @ params.attn_proj[m].T for m in range(len(xs))]
    grads = {f"attn_proj/{m}": xs[m].T @ gh[m] for m in range(len(xs))}
    grads["attn_query"] = gq.astype(q.dtype)
    return gxs, grads


def _xavier(stream: RandomStream, shape: tuple[int, ...]) -> np.ndarray:
    fan_in = shape[0]
    fan_out = shape[1] if len(shape) > 1 else 1
    bound = math.sqrt(6.0 / (fan_in + fan_out))
    u = stream.uniforms(int(np.prod(shape)))
    return ((2.0 * u - 1.0) * bound).reshape(shape).astype(np.float32)


def init_combiner_params(
    kind: CombinerKind,
    dims: Sequence[int],
    d_c: int | None = None,
    seed: int = 0,
) -> CombinerParams:
    """Seeded parameters for a combiner over streams with the given widths.

    Mix logits start at zero (uniform weights after softmax); attention
    projections and the query use uniform Xavier bounds. Concat and sum carry
    no parameters. Deterministic per (seed, parameter name).
    """
    if not dims or any(d < 1 for d in dims):
        raise InvalidConfig(f"stream widths must be positive, got {list(dims)}")
    kind = CombinerKind(kind)
    if kind in (CombinerKind.CONCAT, CombinerKind.SUM):
        combined_dim(kind, dims)  # equal-width check for sum
        return CombinerParams(kind=kind)
    if kind == CombinerKind.WEIGHTED:
        combined_dim(kind, dims)
        return CombinerParams(kind=kind, mix_logits=np.zeros(len(dims), dtype=np.float32))
    if d_c is None or d_c < 1:
        raise InvalidConfig("attention combiner needs a positive common width d_c")
    proj = [
        _xavier(RandomStream(derive_seed(seed, "init", f"combiner.attn_proj/{m}")), (d, d_c))
        for m, d in enumerate(dims)
    ]
    query = _xavier(
        RandomStream(derive_seed(seed, "init", "combiner.attn_query")), (d_c,)
    )
    return CombinerParams(kind=kind, attn_proj=proj, attn_query=query, d_c=d_c)
