"""Connectionist Temporal Classification: loss, gradient, decoding, oracle.

The loss marginalizes over every frame-level path whose collapse (drop
consecutive duplicates, then drop blanks) equals the target. It is computed
with the forward recursion over the blank-interleaved extended target,
entirely in log-space, so saturated inputs never multiply raw zeros. The
gradient with respect to pre-softmax logits comes from forward-backward
posteriors and is exact:

    d loss / d logit[t, k]  =  softmax(logits)[t, k] - posterior[t, k]

where posterior[t, k] is the probability, given that the full sequence maps
to the target, of emitting symbol k at frame t.

``ctc_brute_force`` enumerates all V**T paths for small instances and is the
independent oracle the loss is tested against.

Blank is index 0 everywhere. Greedy decoding takes the per-frame argmax with
ties broken toward the lowest index (so blank wins ties), then collapses.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    EmptyCorpus,
    IndexOutOfRange,
    InfeasibleTarget,
    InstanceTooLarge,
    InvalidConfig,
    UnknownSymbol,
    UnnormalizedInput,
)

BLANK = 0

_NEG_INF = -np.inf


@dataclass(frozen=True)
class Vocab:
    """Character vocabulary with blank fixed at index 0.

    ``chars`` holds the non-blank symbols; symbol i of the full vocabulary is
    ``chars[i - 1]`` for i >= 1.
    """

    chars: str

    def __post_init__(self):
        if len(set(self.chars)) != len(self.chars):
            raise InvalidConfig(f"duplicate symbols in vocabulary {self.chars!r}")
        if len(self.chars) < 1:
            raise InvalidConfig("vocabulary needs at least one non-blank symbol")

    @property
    def size(self) -> int:
        return len(self.chars) + 1

    @classmethod
    def from_transcripts(cls, transcripts: Iterable[str]) -> "Vocab":
        """Distinct characters of all transcripts in code-point order."""
        symbols = sorted({c for t in transcripts for c in t})
        if not symbols:
            raise EmptyCorpus("no characters found in transcripts")
        return cls("".join(symbols))

    def encode(self, text: str) -> list[int]:
        try:
            return [self.chars.index(c) + 1 for c in text]
        except ValueError:
            bad = sorted(set(text) - set(self.chars))
            raise UnknownSymbol(f"symbol(s) not in vocabulary: {bad}") from None

    def decode(self, ids: Sequence[int]) -> str:
        out = []
        for i in ids:
            if not 1 <= i < self.size:
                raise IndexOutOfRange(f"non-blank symbol index {i} out of range")
            out.append(self.chars[i - 1])
        return "".join(out)


@dataclass
class CtcResult:
    loss: float  # negative log-likelihood, natural log
    grad_logits: np.ndarray  # (T, V), gradient wrt pre-softmax logits


def collapse(path: Sequence[int], vocab_size: int) -> list[int]:
    """Remove consecutive duplicates, then remove blanks."""
    out = []
    prev = None
    for idx in path:
        if not 0 <= idx < vocab_size:
            raise IndexOutOfRange(f"path index {idx} out of range [0, {vocab_size})")
        if idx != prev and idx != BLANK:
            out.append(idx)
        prev = idx
    return out


def min_frames(target: Sequence[int]) -> int:
    """Minimum T that can emit ``target``: length plus adjacent equal pairs."""
    pairs = sum(1 for a, b in zip(target, target[1:]) if a == b)
    return len(target) + pairs


def log_softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise log-softmax over the last axis (computed in float64)."""
    x = np.asarray(logits, dtype=np.float64)
    x = x - x.max(axis=-1, keepdims=True)
    return x - np.log(np.exp(x).sum(axis=-1, keepdims=True))


def _check_target(target: Sequence[int], vocab_size: int) -> None:
    for idx in target:
        if not 1 <= idx < vocab_size:
            raise UnknownSymbol(
                f"target symbol {idx} invalid (blank is reserved, vocab size {vocab_size})"
            )


def _extended(target: Sequence[int]) -> np.ndarray:
    """Blank-interleaved extended target of length 2*len+1."""
    ext = np.full(2 * len(target) + 1, BLANK, dtype=np.int64)
    ext[1::2] = target
    return ext


def ctc_loss_grad(logits: np.ndarray, target: Sequence[int]) -> CtcResult:
    """Loss and exact logits gradient for one utterance.

    ``logits`` is (T, V) pre-softmax; ``target`` holds non-blank indices.
    Raises ``InfeasibleTarget`` (carrying the minimal required T) when the
    length bound T >= len(target) + adjacent-equal-pairs is violated.
    """
    logits = np.asarray(logits)
    if logits.ndim != 2:
        raise InvalidConfig(f"logits must be (T, V), got shape {logits.shape}")
    T, V = logits.shape
    if V < 2:
        raise InvalidConfig("vocabulary must have at least blank plus one symbol")
    _check_target(target, V)
    need = min_frames(target)
    if T < need:
        raise InfeasibleTarget(
            f"target of length {len(target)} needs at least {need} frames, got {T}",
            required_frames=need,
        )
    if T == 0:
        # Zero frames can only emit the empty target, with probability 1.
        return CtcResult(loss=0.0, grad_logits=np.zeros_like(logits))

    log_y = log_softmax(logits)  # float64 (T, V)
    ext = _extended(target)
    S = len(ext)
    # skip transition s-2 -> s allowed when ext[s] is a label differing from ext[s-2]
    can_skip = np.zeros(S, dtype=bool)
    if S > 2:
        can_skip[2:] = (ext[2:] != BLANK) & (ext[2:] != ext[:-2])

    emit = log_y[:, ext]  # (T, S)

    alpha = np.full((T, S), _NEG_INF)
    alpha[0, 0] = emit[0, 0]
    if S > 1:
        alpha[0, 1] = emit[0, 1]
    for t in range(1, T):
        prev = alpha[t - 1]
        acc = prev.copy()
        acc[1:] = np.logaddexp(acc[1:], prev[:-1])
        if S > 2:
            acc[2:] = np.where(
                can_skip[2:], np.logaddexp(acc[2:], prev[:-2]), acc[2:]
            )
        alpha[t] = acc + emit[t]

    log_z = alpha[T - 1, S - 1]
    if S > 1:
        log_z = np.logaddexp(log_z, alpha[T - 1, S - 2])

    # beta includes the emission at t, mirroring alpha.
    beta = np.full((T, S), _NEG_INF)
    beta[T - 1, S - 1] = emit[T - 1, S - 1]
    if S > 1:
        beta[T - 1, S - 2] = emit[T - 1, S - 2]
    for t in range(T - 2, -1, -1):
        nxt = beta[t + 1]
        acc = nxt.copy()
        acc[:-1] = np.logaddexp(acc[:-1], nxt[1:])
        if S > 2:
            acc[:-2] = np.where(
                can_skip[2:], np.logaddexp(acc[:-2], nxt[2:]), acc[:-2]
            )
        beta[t] = acc + emit[t]

    # Posterior over emitted symbols: gather alpha*beta by extended-state label,
    # dividing out the doubly counted emission.
    ab = alpha + beta  # (T, S)
    with np.errstate(invalid="ignore"):
        post = np.full((T, V), _NEG_INF)
        for s in range(S):
            k = ext[s]
            post[:, k] = np.logaddexp(post[:, k], ab[:, s])
        gamma = np.zeros((T, V))
        # log_z = -inf only with infinite logits; the posterior is then vacuous.
        occupied = (post > _NEG_INF) & np.isfinite(log_z)
        gamma[occupied] = np.exp((post - log_z - log_y)[occupied])

    grad = (np.exp(log_y) - gamma).astype(logits.dtype)
    return CtcResult(loss=float(-log_z), grad_logits=grad)


def ctc_brute_force(probs: np.ndarray, target: Sequence[int]) -> float:
    """Total probability of ``target`` by enumerating all V**T paths.

    Independent oracle for ``ctc_loss_grad``: sums the product probability of
    every path whose collapse equals the target. Linear-domain input rows
    must sum to 1.
    """
    probs = np.asarray(probs, dtype=np.float64)
    T, V = probs.shape
    if T > 8 or V > 5:
        raise InstanceTooLarge(f"refusing {V}**{T} path enumeration")
    if not np.allclose(probs.sum(axis=1), 1.0, atol=1e-6):
        raise UnnormalizedInput("probability rows must sum to 1")
    _check_target(target, V)
    want = list(target)
    total = 0.0
    for path in itertools.product(range(V), repeat=T):
        if collapse(path, V) == want:
            p = 1.0
            for t, k in enumerate(path):
                p *= probs[t, k]
            total += p
    return total


def check_log_probs(logprobs: np.ndarray, tol: float = 1e-5) -> None:
    """Require each row to be a normalized log distribution."""
    lse = np.log(np.exp(logprobs - logprobs.max(axis=1, keepdims=True)).sum(axis=1))
    lse = lse + logprobs.max(axis=1)
    if not np.all(np.abs(lse) <= tol):
        raise UnnormalizedInput(
            f"log-probability rows deviate from normalization by up to {np.abs(lse).max():.3e}"
        )


def greedy_decode(logprobs: np.ndarray, vocab: Vocab, validate: bool = True) -> str:
    """Best-path decoding: per-frame argmax, collapse, map to characters.

    No language model; argmax ties break toward the lowest index, so blank
    wins ties.
    """
    logprobs = np.asarray(logprobs)
    if logprobs.ndim != 2 or logprobs.shape[1] != vocab.size:
        raise InvalidConfig(
            f"logprobs shape {logprobs.shape} does not match vocab size {vocab.size}"
        )
    if validate and logprobs.shape[0] > 0:
        check_log_probs(logprobs)
    path = np.argmax(logprobs, axis=1)
    return vocab.decode(collapse(path, vocab.size))
