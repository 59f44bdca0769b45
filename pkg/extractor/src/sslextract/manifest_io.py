"""Corpus manifest writing and merging.

Same JSON-lines shape the consumer package reads::

    {"id": "...", "transcript": "...", "features": {"<tag>": "<relative path>"}}

Key order of the ``features`` object is the canonical model order, so merges
preserve existing tag order and append new tags at the end.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import TranscriptMismatch


def load_records(path: str | Path) -> list[dict]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                records.append(
                    {"id": obj["id"], "transcript": obj["transcript"], "features": dict(obj["features"])}
                )
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: bad manifest line: {exc}") from exc
    return records


def merge_records(
    existing: list[dict], utterances: dict[str, tuple[str, str]], model_tag: str
) -> list[dict]:
    """Add one model's (transcript, feature path) per id to existing records.

    With no existing records, creates them in sorted id order. Otherwise the
    id sets and transcripts must agree exactly; a tag that is already present
    gets its paths replaced (re-extraction is idempotent).
    """
    if not existing:
        return [
            {"id": uid, "transcript": t, "features": {model_tag: rel}}
            for uid, (t, rel) in sorted(utterances.items())
        ]
    old_ids = {r["id"] for r in existing}
    missing = sorted(old_ids - utterances.keys())
    extra = sorted(utterances.keys() - old_ids)
    if missing or extra:
        raise TranscriptMismatch(
            f"cannot merge into existing manifest: ids missing from this extraction "
            f"{missing}, ids not in the manifest {extra}"
        )
    merged = []
    for rec in existing:
        transcript, rel = utterances[rec["id"]]
        if transcript != rec["transcript"]:
            raise TranscriptMismatch(
                f"{rec['id']}: transcript {transcript!r} does not match "
                f"manifest transcript {rec['transcript']!r}"
            )
        features = dict(rec["features"])
        features[model_tag] = rel
        merged.append({"id": rec["id"], "transcript": rec["transcript"], "features": features})
    return merged


def write_records(path: str | Path, records: list[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
