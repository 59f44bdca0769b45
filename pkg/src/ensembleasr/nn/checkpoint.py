"""Binary head checkpoints.

Layout (little-endian): magic "ENSC", version u32 = 1, u32-length-prefixed
JSON config block (encoder config, combiner kind and common width, vocabulary
string, model tag order, per-model input widths), parameter count u32, then
per parameter: name (u16 length + UTF-8), rank u8, shape (u32 per axis),
payload as 32-bit reals. Loads reject version, shape, or config mismatches.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..combiners import CombinerKind, CombinerParams, combined_dim
from ..errors import FormatError
from .encoder import EncoderConfig, expected_param_shapes
from .params import ParamStore

MAGIC = b"ENSC"
VERSION = 1


@dataclass
class CheckpointMeta:
    """Everything needed to rebuild the head besides the tensors themselves."""

    encoder: EncoderConfig
    combiner_kind: CombinerKind
    d_c: int | None
    vocab_chars: str  # non-blank symbols in index order (blank is implicit index 0)
    model_tags: tuple[str, ...]
    input_dims: tuple[int, ...]

    @property
    def in_dim(self) -> int:
        return combined_dim(self.combiner_kind, self.input_dims, self.d_c)

    @property
    def vocab_size(self) -> int:
        return len(self.vocab_chars) + 1

    def to_json(self) -> bytes:
        doc = {
            "encoder": self.encoder.to_dict(),
            "combiner": {"kind": self.combiner_kind.value, "d_c": self.d_c},
            "vocab": self.vocab_chars,
            "model_tags": list(self.model_tags),
            "input_dims": list(self.input_dims),
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")

    @classmethod
    def from_json(cls, raw: bytes) -> "CheckpointMeta":
        try:
            doc = json.loads(raw.decode("utf-8"))
            meta = cls(
                encoder=EncoderConfig.from_dict(doc["encoder"]),
                combiner_kind=CombinerKind(doc["combiner"]["kind"]),
                d_c=doc["combiner"]["d_c"],
                vocab_chars=doc["vocab"],
                model_tags=tuple(doc["model_tags"]),
                input_dims=tuple(int(d) for d in doc["input_dims"]),
            )
        except (ValueError, KeyError, TypeError) as exc:
            raise FormatError(f"malformed checkpoint config block: {exc}") from exc
        if len(meta.model_tags) != len(meta.input_dims):
            raise FormatError(
                f"{len(meta.model_tags)} model tags but {len(meta.input_dims)} input widths"
            )
        return meta

    def expected_shapes(self) -> dict[str, tuple[int, ...]]:
        shapes = expected_param_shapes(self.encoder, self.in_dim, self.vocab_size)
        n = len(self.model_tags)
        if self.combiner_kind == CombinerKind.WEIGHTED:
            shapes["combiner.mix_logits"] = (n,)
        elif self.combiner_kind == CombinerKind.ATTENTION:
            for m, d in enumerate(self.input_dims):
                shapes[f"combiner.attn_proj/{m}"] = (d, self.d_c)
            shapes["combiner.attn_query"] = (self.d_c,)
        return shapes


def rebuild_combiner(meta: CheckpointMeta, params: ParamStore) -> CombinerParams:
    """CombinerParams whose arrays alias the store (no copies)."""
    kind = meta.combiner_kind
    if kind == CombinerKind.WEIGHTED:
        return CombinerParams(kind=kind, mix_logits=params["combiner.mix_logits"])
    if kind == CombinerKind.ATTENTION:
        proj = [params[f"combiner.attn_proj/{m}"] for m in range(len(meta.model_tags))]
        return CombinerParams(
            kind=kind, attn_proj=proj, attn_query=params["combiner.attn_query"], d_c=meta.d_c
        )
    return CombinerParams(kind=kind)


def save_checkpoint(path: str | Path, meta: CheckpointMeta, params: ParamStore) -> None:
    config = meta.to_json()
    expected = meta.expected_shapes()
    names = params.names()
    _check_shapes(expected, {n: params[n].shape for n in names}, str(path))
    chunks = [MAGIC, struct.pack("<I", VERSION), struct.pack("<I", len(config)), config]
    chunks.append(struct.pack("<I", len(names)))
    for name in names:
        value = params[name]
        raw = name.encode("utf-8")
        chunks.append(struct.pack("<H", len(raw)))
        chunks.append(raw)
        chunks.append(struct.pack("<B", value.ndim))
        chunks.append(struct.pack(f"<{value.ndim}I", *value.shape))
        chunks.append(np.ascontiguousarray(value, dtype="<f4").tobytes())
    Path(path).write_bytes(b"".join(chunks))


class _Reader:
    def __init__(self, data: bytes, path: str):
        self.data = data
        self.pos = 0
        self.path = path

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise FormatError(
                f"truncated checkpoint {self.path}: wanted {n} bytes at offset {self.pos}, "
                f"only {len(self.data) - self.pos} remain"
            )
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def load_checkpoint(path: str | Path) -> tuple[CheckpointMeta, ParamStore]:
    r = _Reader(Path(path).read_bytes(), str(path))
    if r.take(4) != MAGIC:
        raise FormatError(f"{path} is not a head checkpoint (bad magic)")
    (version,) = r.unpack("<I")
    if version != VERSION:
        raise FormatError(f"{path}: unsupported checkpoint version {version}")
    (config_len,) = r.unpack("<I")
    meta = CheckpointMeta.from_json(r.take(config_len))
    (count,) = r.unpack("<I")
    params = ParamStore()
    for _ in range(count):
        (name_len,) = r.unpack("<H")
        name = r.take(name_len).decode("utf-8")
        (rank,) = r.unpack("<B")
        shape = r.unpack(f"<{rank}I") if rank else ()
        n = int(np.prod(shape, dtype=np.int64)) if shape else 1
        payload = r.take(4 * n)
        value = np.frombuffer(payload, dtype="<f4").reshape(shape).copy()
        if not np.all(np.isfinite(value)):
            raise FormatError(f"{path}: parameter {name} contains non-finite values")
        params.add(name, value)
    if r.pos != len(r.data):
        raise FormatError(f"{path}: {len(r.data) - r.pos} trailing bytes after parameters")
    _check_shapes(meta.expected_shapes(), {n: params[n].shape for n in params.names()}, str(path))
    return meta, params


def _check_shapes(expected: dict, actual: dict, path: str) -> None:
    missing = sorted(set(expected) - set(actual))
    extra = sorted(set(actual) - set(expected))
    if missing or extra:
        raise FormatError(
            f"{path}: parameter names do not match the config block"
            + (f"; missing {missing}" if missing else "")
            + (f"; unexpected {extra}" if extra else "")
        )
    for name, shape in expected.items():
        if tuple(actual[name]) != tuple(shape):
            raise FormatError(
                f"{path}: parameter {name} has shape {tuple(actual[name])}, expected {tuple(shape)}"
            )
