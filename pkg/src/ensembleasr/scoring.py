"""Decoding and error-rate scoring.

Levenshtein alignment with a deterministic backtrace (the distance is unique,
the substitution/insertion/deletion split is not: ties prefer the diagonal,
then deletion, then insertion). Corpus rates pool edits over the whole set —
sum of edits / sum of reference tokens — rather than averaging per-utterance
rates.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .combiners import combine
from .ctc import Vocab, greedy_decode, log_softmax
from .errors import EmptyReference, TagMissing
from .features import align_frames
from .manifest import Manifest, load_record_features
from .nn import head_forward, load_checkpoint, pad_batch, rebuild_combiner


@dataclass
class WerBreakdown:
    substitutions: int
    insertions: int
    deletions: int
    ref_tokens: int

    @property
    def edits(self) -> int:
        return self.substitutions + self.insertions + self.deletions

    @property
    def error_rate(self) -> float:
        if self.ref_tokens <= 0:
            raise EmptyReference("error rate undefined for an empty reference")
        return self.edits / self.ref_tokens


@dataclass
class DecodeResult:
    id: str
    reference: str
    hypothesis: str
    words: WerBreakdown


@dataclass
class EvalReport:
    results: list[DecodeResult]
    words: WerBreakdown
    chars: WerBreakdown


def edit_distance(ref: Sequence[str], hyp: Sequence[str]) -> WerBreakdown:
    """Unit-cost Levenshtein breakdown between token sequences."""
    R, H = len(ref), len(hyp)
    if R == 0:
        raise EmptyReference("reference has no tokens")
    # plain-list DP: sequences are short and this runs millions of times in
    # exhaustive scoring tests, where array allocation would dominate
    rows = [list(range(H + 1))]
    for i in range(1, R + 1):
        prev = rows[-1]
        cur = [i] + [0] * H
        ri = ref[i - 1]
        for j in range(1, H + 1):
            best = prev[j - 1] + (ri != hyp[j - 1])
            up = prev[j] + 1
            if up < best:
                best = up
            left = cur[j - 1] + 1
            if left < best:
                best = left
            cur[j] = best
        rows.append(cur)
    s = ins = dele = 0
    i, j = R, H
    while i > 0 or j > 0:
        if i > 0 and j > 0 and rows[i][j] == rows[i - 1][j - 1] + (ref[i - 1] != hyp[j - 1]):
            if ref[i - 1] != hyp[j - 1]:
                s += 1
            i -= 1
            j -= 1
        elif i > 0 and rows[i][j] == rows[i - 1][j] + 1:
            dele += 1
            i -= 1
        else:
            ins += 1
            j -= 1
    return WerBreakdown(s, ins, dele, R)


def tokenize(text: str, unit: str) -> list[str]:
    """"word": split on spaces; "char": per character, spaces included."""
    if unit == "word":
        return [t for t in text.split(" ") if t]
    if unit == "char":
        return list(text)
    raise ValueError(f"unknown token unit {unit!r}")


def score_corpus(pairs: Iterable[tuple[str, str]], unit: str = "word") -> WerBreakdown:
    """Pooled breakdown over (reference, hypothesis) string pairs."""
    total = WerBreakdown(0, 0, 0, 0)
    for ref_text, hyp_text in pairs:
        ref = tokenize(ref_text, unit)
        hyp = tokenize(hyp_text, unit)
        if not ref:
            # no reference tokens: every hypothesis token is an insertion
            total.insertions += len(hyp)
            continue
        b = edit_distance(ref, hyp)
        total.substitutions += b.substitutions
        total.insertions += b.insertions
        total.deletions += b.deletions
        total.ref_tokens += b.ref_tokens
    if total.ref_tokens == 0:
        raise EmptyReference("no reference tokens in the corpus")
    return total


def evaluate(
    manifest: Manifest, checkpoint_path: str | Path, align_tolerance: int = 2
) -> EvalReport:
    """Decode every manifest record with a trained head and score it.

    Utterances run one at a time in inference mode (dropout off), so results
    do not depend on any batch grouping.
    """
    meta, params = load_checkpoint(checkpoint_path)
    missing = [t for t in meta.model_tags if t not in manifest.model_tags]
    if missing:
        raise TagMissing(
            f"checkpoint needs feature streams {missing} not present in manifest "
            f"(has {sorted(manifest.model_tags)})"
        )
    vocab = Vocab(meta.vocab_chars)
    combiner = rebuild_combiner(meta, params)
    results = []
    for rec in manifest.records:
        mats = align_frames(
            load_record_features(manifest, rec, list(meta.model_tags)), align_tolerance
        )
        combined = combine(mats, combiner)
        batch = pad_batch([combined.values])
        logits, _ = head_forward(batch, meta.encoder, params, train_mode=False)
        hyp = greedy_decode(log_softmax(logits[0].astype(np.float64)), vocab)
        words = score_corpus([(rec.transcript, hyp)], "word")
        results.append(DecodeResult(rec.id, rec.transcript, hyp, words))
    pairs = [(r.reference, r.hypothesis) for r in results]
    return EvalReport(results, score_corpus(pairs, "word"), score_corpus(pairs, "char"))


def format_report(words: WerBreakdown, chars: WerBreakdown) -> str:
    """Aggregate line: WER/CER as percentages plus the word-level edit split."""
    return (
        f"WER {100.0 * words.error_rate:.2f} CER {100.0 * chars.error_rate:.2f} "
        f"S {words.substitutions} I {words.insertions} D {words.deletions} "
        f"N {words.ref_tokens}"
    )


def write_hyp_dump(path: str | Path, results: Sequence[DecodeResult]) -> None:
    """One JSON object per line: id, ref, hyp, per-utterance word error rate."""
    with open(path, "w", encoding="utf-8") as fh:
        for r in results:
            fh.write(
                json.dumps(
                    {
                        "id": r.id,
                        "ref": r.reference,
                        "hyp": r.hypothesis,
                        "wer": r.words.error_rate,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
