"""Transformer encoder stack with exact backprop.

Post-norm residual blocks: [self-attention -> residual add -> layer norm ->
ReLU feed-forward -> residual add -> layer norm], sinusoidal positions added
once at the input. All padded positions are kept at exactly zero between
sublayers so real-frame outputs never depend on padding content.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..combiners import CombinerKind, CombinerParams
from ..errors import InvalidConfig, OddWidth
from ..rng import RandomStream, derive_seed
from .layers import (
    dropout_backward,
    dropout_forward,
    layer_norm_backward,
    layer_norm_forward,
    linear_backward,
    linear_forward,
    relu_backward,
    relu_forward,
)
from .attention import mha_backward, mha_forward
from .params import ParamStore

_ATTN_ROLES = ("Wq", "bq", "Wk", "bk", "Wv", "bv", "Wo", "bo")


@dataclass
class EncoderConfig:
    num_layers: int
    d_model: int
    num_heads: int = 4
    d_ff: int = 0  # 0 means the conventional 4 * d_model
    dropout_rate: float = 0.0
    use_positions: bool = True

    def __post_init__(self):
        if self.d_ff == 0:
            self.d_ff = 4 * self.d_model

    def validate(self) -> None:
        if self.num_layers < 0:
            raise InvalidConfig(f"num_layers must be >= 0, got {self.num_layers}")
        if self.d_model < 1:
            raise InvalidConfig(f"d_model must be positive, got {self.d_model}")
        if self.num_heads < 1:
            raise InvalidConfig(f"num_heads must be positive, got {self.num_heads}")
        if self.d_model % self.num_heads != 0:
            raise InvalidConfig(
                f"d_model {self.d_model} must be divisible by num_heads {self.num_heads}"
            )
        if self.d_ff < 1:
            raise InvalidConfig(f"d_ff must be positive, got {self.d_ff}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise InvalidConfig(f"dropout_rate must be in [0, 1), got {self.dropout_rate}")
        if self.use_positions and self.d_model % 2 != 0:
            raise InvalidConfig(
                f"positional encodings need an even d_model, got {self.d_model}"
            )

    def to_dict(self) -> dict:
        return {
            "num_layers": self.num_layers,
            "d_model": self.d_model,
            "num_heads": self.num_heads,
            "d_ff": self.d_ff,
            "dropout_rate": self.dropout_rate,
            "use_positions": self.use_positions,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EncoderConfig":
        cfg = cls(**{k: d[k] for k in cls.__dataclass_fields__ if k in d})
        cfg.validate()
        return cfg


def sinusoidal_positions(max_frames: int, d_model: int) -> np.ndarray:
    """Fixed positional table: (t, 2i) = sin(t/10000^(2i/d)), (t, 2i+1) = cos."""
    if d_model % 2 != 0:
        raise OddWidth(f"positional encodings need an even width, got {d_model}")
    t = np.arange(max_frames, dtype=np.float64)[:, None]
    i = np.arange(0, d_model, 2, dtype=np.float64)[None, :]
    angles = t / np.power(10000.0, i / d_model)
    out = np.empty((max_frames, d_model), dtype=np.float64)
    out[:, 0::2] = np.sin(angles)
    out[:, 1::2] = np.cos(angles)
    return out


def expected_param_shapes(
    cfg: EncoderConfig,
    in_dim: int,
    vocab_size: int,
    combiner: CombinerParams | None = None,
) -> dict[str, tuple[int, ...]]:
    """Canonical name -> shape map for every trainable tensor of a head."""
    D, F = cfg.d_model, cfg.d_ff
    shapes: dict[str, tuple[int, ...]] = {
        "proj.W": (in_dim, D),
        "proj.b": (D,),
    }
    for l in range(cfg.num_layers):
        p = f"enc{l}"
        for role in _ATTN_ROLES:
            shapes[f"{p}.attn.{role}"] = (D, D) if role.startswith("W") else (D,)
        shapes[f"{p}.ln1.gain"] = (D,)
        shapes[f"{p}.ln1.shift"] = (D,)
        shapes[f"{p}.ffn.W1"] = (D, F)
        shapes[f"{p}.ffn.b1"] = (F,)
        shapes[f"{p}.ffn.W2"] = (F, D)
        shapes[f"{p}.ffn.b2"] = (D,)
        shapes[f"{p}.ln2.gain"] = (D,)
        shapes[f"{p}.ln2.shift"] = (D,)
    shapes["ctc.W"] = (D, vocab_size)
    shapes["ctc.b"] = (vocab_size,)
    if combiner is not None:
        if combiner.kind == CombinerKind.WEIGHTED:
            shapes["combiner.mix_logits"] = combiner.mix_logits.shape
        elif combiner.kind == CombinerKind.ATTENTION:
            for m, p in enumerate(combiner.attn_proj):
                shapes[f"combiner.attn_proj/{m}"] = p.shape
            shapes["combiner.attn_query"] = combiner.attn_query.shape
    return shapes


def _xavier(name: str, shape: tuple[int, ...], seed: int) -> np.ndarray:
    fan_in = shape[0]
    fan_out = shape[1] if len(shape) > 1 else 1
    bound = math.sqrt(6.0 / (fan_in + fan_out))
    stream = RandomStream(derive_seed(seed, "init", name))
    u = stream.uniforms(int(np.prod(shape)))
    return ((2.0 * u - 1.0) * bound).reshape(shape).astype(np.float32)


def init_params(
    cfg: EncoderConfig,
    in_dim: int,
    vocab_size: int,
    combiner: CombinerParams | None,
    seed: int,
) -> ParamStore:
    """Seeded head parameters: Xavier-uniform weights, zero biases and
    layer-norm shifts, unit layer-norm gains.

    Each tensor draws from its own counter stream keyed by (seed, name), so
    initialization is independent of insertion order. Combiner tensors are
    inserted by reference: in-place optimizer updates keep the live
    ``CombinerParams`` in sync with the store.
    """
    cfg.validate()
    if in_dim < 1 or vocab_size < 2:
        raise InvalidConfig(
            f"need in_dim >= 1 and vocab_size >= 2, got {in_dim} and {vocab_size}"
        )
    store = ParamStore()
    for name, shape in expected_param_shapes(cfg, in_dim, vocab_size).items():
        if name.endswith(".gain"):
            store.add(name, np.ones(shape, dtype=np.float32))
        elif name.split(".")[-1].startswith(("b", "shift")):
            store.add(name, np.zeros(shape, dtype=np.float32))
        else:
            store.add(name, _xavier(name, shape, seed))
    if combiner is not None:
        if combiner.kind == CombinerKind.WEIGHTED:
            store.add("combiner.mix_logits", combiner.mix_logits)
        elif combiner.kind == CombinerKind.ATTENTION:
            for m, p in enumerate(combiner.attn_proj):
                store.add(f"combiner.attn_proj/{m}", p)
            store.add("combiner.attn_query", combiner.attn_query)
    return store


def _layer_weights(params: ParamStore, l: int) -> dict[str, np.ndarray]:
    return {role: params[f"enc{l}.attn.{role}"] for role in _ATTN_ROLES}


def _draw(stream: RandomStream | None, rate: float, shape, train_mode: bool):
    if not train_mode or rate <= 0.0 or stream is None:
        return None
    return stream.uniforms(int(np.prod(shape))).reshape(shape)


def encoder_forward(
    x: np.ndarray,
    frame_mask: np.ndarray,
    cfg: EncoderConfig,
    params: ParamStore,
    train_mode: bool = False,
    dropout_stream: RandomStream | None = None,
):
    """Run the stack over (B, T, d_model); returns (output, cache).

    num_layers = 0 is the identity (plus positions unless disabled).
    """
    mask3 = frame_mask[:, :, None]
    h = x * mask3
    if cfg.use_positions and x.shape[1] > 0:
        pos = sinusoidal_positions(x.shape[1], cfg.d_model).astype(x.dtype)
        h = (h + pos[None, :, :]) * mask3
    layers = []
    rate = cfg.dropout_rate
    for l in range(cfg.num_layers):
        attn_out, c_attn = mha_forward(h, frame_mask, _layer_weights(params, l), cfg.num_heads)
        attn_out, c_do1 = dropout_forward(
            attn_out, rate, _draw(dropout_stream, rate, attn_out.shape, train_mode)
        )
        n1, c_ln1 = layer_norm_forward(
            h + attn_out, params[f"enc{l}.ln1.gain"], params[f"enc{l}.ln1.shift"]
        )
        n1 = n1 * mask3

        f1, c_f1 = linear_forward(n1, params[f"enc{l}.ffn.W1"], params[f"enc{l}.ffn.b1"])
        f2, c_relu = relu_forward(f1)
        f3, c_f2 = linear_forward(f2, params[f"enc{l}.ffn.W2"], params[f"enc{l}.ffn.b2"])
        f3, c_do2 = dropout_forward(
            f3, rate, _draw(dropout_stream, rate, f3.shape, train_mode)
        )
        n2, c_ln2 = layer_norm_forward(
            n1 + f3, params[f"enc{l}.ln2.gain"], params[f"enc{l}.ln2.shift"]
        )
        h = n2 * mask3
        layers.append((c_attn, c_do1, c_ln1, c_f1, c_relu, c_f2, c_do2, c_ln2))
    return h, (mask3, layers, cfg)


def encoder_backward(cache, grad_out: np.ndarray, params: ParamStore) -> np.ndarray:
    """Adjoint of ``encoder_forward``; accumulates parameter gradients into
    the store and returns the gradient at the (post-projection) input."""
    mask3, layers, cfg = cache
    g = grad_out * mask3
    for l in reversed(range(cfg.num_layers)):
        c_attn, c_do1, c_ln1, c_f1, c_relu, c_f2, c_do2, c_ln2 = layers[l]
        g_r2, g_gain2, g_shift2 = layer_norm_backward(c_ln2, g)
        params.accumulate(f"enc{l}.ln2.gain", g_gain2)
        params.accumulate(f"enc{l}.ln2.shift", g_shift2)

        g_f3 = dropout_backward(c_do2, g_r2)
        g_f2, gW2, gb2 = linear_backward(c_f2, g_f3)
        params.accumulate(f"enc{l}.ffn.W2", gW2)
        params.accumulate(f"enc{l}.ffn.b2", gb2)
        g_f1 = relu_backward(c_relu, g_f2)
        g_n1_ffn, gW1, gb1 = linear_backward(c_f1, g_f1)
        params.accumulate(f"enc{l}.ffn.W1", gW1)
        params.accumulate(f"enc{l}.ffn.b1", gb1)

        g_n1 = (g_r2 + g_n1_ffn) * mask3
        g_r1, g_gain1, g_shift1 = layer_norm_backward(c_ln1, g_n1)
        params.accumulate(f"enc{l}.ln1.gain", g_gain1)
        params.accumulate(f"enc{l}.ln1.shift", g_shift1)

        g_attn_out = dropout_backward(c_do1, g_r1)
        g_h_attn, attn_grads = mha_backward(c_attn, g_attn_out)
        for role, grad in attn_grads.items():
            params.accumulate(f"enc{l}.attn.{role}", grad)
        g = (g_r1 + g_h_attn) * mask3
    return g * mask3
