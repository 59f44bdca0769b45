"""Head training over frozen feature files.

Per batch: combine aligned streams, project, run the encoder stack, compute
per-utterance CTC losses masked to true lengths (batch loss = their mean),
backprop through head and any learnable combiner parameters, clip by global
norm, apply a bias-corrected Adam step. Feature files are read-only
throughout; the only trainable tensors live in the ParamStore.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .combiners import CombinerKind, CombinerParams, combine, combine_backward, combined_dim, init_combiner_params
from .ctc import Vocab, ctc_loss_grad, min_frames
from .errors import (
    DimMismatch,
    EmptyCorpus,
    InfeasibleUtterance,
    InvalidConfig,
    NonFiniteLoss,
)
from .features import FeatureMatrix, align_frames, read_feature_header
from .manifest import Manifest, UtteranceRecord, load_record_features
from .nn import (
    CheckpointMeta,
    EncoderConfig,
    ParamStore,
    head_backward,
    head_forward,
    init_params,
    pad_batch,
    save_checkpoint,
)
from .rng import RandomStream, derive_seed

LogFn = Callable[[str], None]


@dataclass
class TrainConfig:
    model_tags: tuple[str, ...]
    encoder: EncoderConfig
    combiner_kind: CombinerKind = CombinerKind.CONCAT
    d_c: int | None = None
    epochs: int = 10
    batch_size: int = 8
    learning_rate: float = 1e-3
    adam_betas: tuple[float, float] = (0.9, 0.999)
    adam_eps: float = 1e-8
    clip_norm: float | None = 5.0
    seed: int = 0
    sort_by_length: bool = True
    align_tolerance: int = 2

    def validate(self) -> None:
        if not self.model_tags:
            raise InvalidConfig("model_tags must name at least one feature stream")
        if self.epochs < 1:
            raise InvalidConfig(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise InvalidConfig(f"batch_size must be >= 1, got {self.batch_size}")
        if self.learning_rate <= 0:
            raise InvalidConfig(f"learning_rate must be positive, got {self.learning_rate}")
        b1, b2 = self.adam_betas
        if not (0.0 <= b1 < 1.0 and 0.0 <= b2 < 1.0):
            raise InvalidConfig(f"adam betas must lie in [0, 1), got {self.adam_betas}")
        if self.adam_eps <= 0:
            raise InvalidConfig(f"adam_eps must be positive, got {self.adam_eps}")
        if self.clip_norm is not None and self.clip_norm <= 0:
            raise InvalidConfig(f"clip_norm must be positive, got {self.clip_norm}")
        self.encoder.validate()


@dataclass
class TrainReport:
    epoch_losses: list[float]
    epoch_seconds: list[float]
    checkpoint_path: str | None
    config: TrainConfig


@dataclass
class AdamState:
    step: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)


def build_vocab(manifest: Manifest) -> Vocab:
    """Blank at index 0, then the sorted distinct transcript characters."""
    if not manifest.records:
        raise EmptyCorpus("cannot build a vocabulary from an empty manifest")
    return Vocab.from_transcripts(r.transcript for r in manifest.records)


def adam_step(
    params: ParamStore,
    state: AdamState,
    learning_rate: float,
    betas: tuple[float, float] = (0.9, 0.999),
    eps: float = 1e-8,
) -> None:
    """One bias-corrected Adam update, in place (aliases stay valid)."""
    b1, b2 = betas
    state.step += 1
    t = state.step
    for name in params.names():
        g = params.grads[name]
        if name not in state.m:
            state.m[name] = np.zeros_like(g)
            state.v[name] = np.zeros_like(g)
        m = state.m[name]
        v = state.v[name]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        mhat = m / (1.0 - b1**t)
        vhat = v / (1.0 - b2**t)
        p = params[name]
        p -= (learning_rate * mhat / (np.sqrt(vhat) + eps)).astype(p.dtype)


def clip_gradients(params: ParamStore, max_norm: float) -> float:
    """Scale all gradients so the global L2 norm is at most max_norm.

    Returns the pre-clip norm.
    """
    norm = params.global_grad_norm()
    if norm > max_norm:
        scale = max_norm / norm
        for name in params.names():
            params.grads[name] *= scale
    return norm


@dataclass
class _Prepared:
    record: UtteranceRecord
    mats: list[FeatureMatrix]  # aligned, trimmed views
    target: list[int]

    @property
    def num_frames(self) -> int:
        return self.mats[0].num_frames


def _prepare(manifest: Manifest, cfg: TrainConfig, vocab: Vocab) -> list[_Prepared]:
    """Load, align, and encode every utterance; reject infeasible ones up front."""
    missing = [t for t in cfg.model_tags if t not in manifest.model_tags]
    if missing:
        raise InvalidConfig(f"model tags {missing} not present in manifest {sorted(manifest.model_tags)}")
    prepared: list[_Prepared] = []
    dims: dict[str, int] = {}
    infeasible: list[str] = []
    detail: list[str] = []
    for rec in manifest.records:
        mats = align_frames(
            load_record_features(manifest, rec, list(cfg.model_tags)), cfg.align_tolerance
        )
        for m in mats:
            if dims.setdefault(m.model_tag, m.dim) != m.dim:
                raise DimMismatch(
                    f"{rec.id}: stream {m.model_tag} has width {m.dim}, "
                    f"expected {dims[m.model_tag]}"
                )
        target = vocab.encode(rec.transcript)
        need = min_frames(target)
        if mats[0].num_frames < need:
            infeasible.append(rec.id)
            detail.append(f"{rec.id} (needs {need} frames, has {mats[0].num_frames})")
        prepared.append(_Prepared(rec, mats, target))
    if infeasible:
        raise InfeasibleUtterance(
            "utterances too short for their targets: " + ", ".join(detail),
            utterance_ids=infeasible,
        )
    return prepared


def make_batches(
    manifest: Manifest, cfg: TrainConfig, epoch: int = 0
) -> list[list[int]]:
    """Record-index batches for one epoch.

    Grouping is fixed across epochs (length-descending when sort_by_length,
    manifest order otherwise); the order the batches are visited in is
    reshuffled every epoch from (seed, epoch).
    """
    n = len(manifest.records)
    if cfg.sort_by_length:
        lengths = []
        for rec in manifest.records:
            counts = [
                read_feature_header(manifest.feature_path(rec, t))[2] for t in cfg.model_tags
            ]
            lengths.append(min(counts))
        order = sorted(range(n), key=lambda i: (-lengths[i], manifest.records[i].id))
    else:
        order = list(range(n))
    groups = [order[i : i + cfg.batch_size] for i in range(0, n, cfg.batch_size)]
    perm = RandomStream(derive_seed(cfg.seed, "batch-order", epoch)).permutation(len(groups))
    return [groups[p] for p in perm]


def _batch_indices(prepared: Sequence[_Prepared], cfg: TrainConfig, epoch: int) -> list[list[int]]:
    n = len(prepared)
    if cfg.sort_by_length:
        order = sorted(range(n), key=lambda i: (-prepared[i].num_frames, prepared[i].record.id))
    else:
        order = list(range(n))
    groups = [order[i : i + cfg.batch_size] for i in range(0, n, cfg.batch_size)]
    perm = RandomStream(derive_seed(cfg.seed, "batch-order", epoch)).permutation(len(groups))
    return [groups[p] for p in perm]


def train(
    manifest: Manifest,
    cfg: TrainConfig,
    checkpoint_path: str | Path | None = None,
    log: LogFn | None = None,
) -> TrainReport:
    """Train a head on the manifest; optionally write the final checkpoint.

    Emits one log line per epoch: ``epoch <k> loss <value> seconds <value>``.
    """
    cfg.validate()
    vocab = build_vocab(manifest)
    prepared = _prepare(manifest, cfg, vocab)

    dims = [prepared[0].mats[m].dim for m in range(len(cfg.model_tags))]
    combiner = init_combiner_params(cfg.combiner_kind, dims, cfg.d_c, cfg.seed)
    in_dim = combined_dim(cfg.combiner_kind, dims, cfg.d_c)
    params = init_params(cfg.encoder, in_dim, vocab.size, combiner, cfg.seed)
    state = AdamState()

    epoch_losses: list[float] = []
    epoch_seconds: list[float] = []
    for epoch in range(1, cfg.epochs + 1):
        t0 = time.perf_counter()
        dropout_stream = RandomStream(derive_seed(cfg.seed, "dropout", epoch))
        batch_losses: list[float] = []
        for batch_index, idxs in enumerate(_batch_indices(prepared, cfg, epoch)):
            items = [prepared[i] for i in idxs]
            combined = [combine(it.mats, combiner) for it in items]
            batch = pad_batch([c.values for c in combined])
            logits, cache = head_forward(
                batch, cfg.encoder, params, train_mode=True, dropout_stream=dropout_stream
            )
            grad_logits = np.zeros_like(logits)
            losses = []
            for i, it in enumerate(items):
                T = int(batch.lengths[i])
                res = ctc_loss_grad(logits[i, :T].astype(np.float64), it.target)
                losses.append(res.loss)
                grad_logits[i, :T] = res.grad_logits / len(items)
            loss = float(np.mean(losses))
            if not np.isfinite(loss):
                raise NonFiniteLoss(
                    f"loss became non-finite at epoch {epoch}, batch {batch_index}",
                    epoch=epoch,
                    batch_index=batch_index,
                )
            batch_losses.append(loss)

            params.zero_grads()
            grad_x = head_backward(cache, grad_logits, params)
            if cfg.combiner_kind in (CombinerKind.WEIGHTED, CombinerKind.ATTENTION):
                for i, it in enumerate(items):
                    T = int(batch.lengths[i])
                    _, pgrads = combine_backward(it.mats, combiner, grad_x[i, :T])
                    for key, g in pgrads.items():
                        params.accumulate(f"combiner.{key}", g)
            if cfg.clip_norm is not None:
                clip_gradients(params, cfg.clip_norm)
            adam_step(params, state, cfg.learning_rate, cfg.adam_betas, cfg.adam_eps)

        epoch_losses.append(float(np.mean(batch_losses)))
        epoch_seconds.append(time.perf_counter() - t0)
        if log is not None:
            log(f"epoch {epoch} loss {epoch_losses[-1]:.6f} seconds {epoch_seconds[-1]:.3f}")

    path_str = None
    if checkpoint_path is not None:
        meta = CheckpointMeta(
            encoder=cfg.encoder,
            combiner_kind=cfg.combiner_kind,
            d_c=cfg.d_c if cfg.combiner_kind == CombinerKind.ATTENTION else None,
            vocab_chars=vocab.chars,
            model_tags=tuple(cfg.model_tags),
            input_dims=tuple(dims),
        )
        save_checkpoint(checkpoint_path, meta, params)
        path_str = str(checkpoint_path)
    return TrainReport(epoch_losses, epoch_seconds, path_str, cfg)
