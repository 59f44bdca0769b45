"""Corpus manifest: utterance ids, transcripts, and per-model feature paths.

A manifest is UTF-8 JSON-lines, one object per utterance::

    {"id": "...", "transcript": "...", "features": {"<tag>": "<relative path>", ...}}

Paths are relative to the manifest's directory. The key order of the first
record's ``features`` object fixes the canonical model order used everywhere
downstream (combination, checkpoints, decoding).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import EmptyCorpus, FormatError
from .features import FeatureMatrix, read_features


@dataclass
class UtteranceRecord:
    id: str
    transcript: str
    features: dict[str, str]  # model_tag -> relative path


@dataclass
class Manifest:
    root: Path
    records: list[UtteranceRecord]
    model_tags: list[str] = field(default_factory=list)

    def feature_path(self, record: UtteranceRecord, tag: str) -> Path:
        return self.root / record.features[tag]

    def subset(self, indices: list[int]) -> "Manifest":
        return Manifest(self.root, [self.records[i] for i in indices], list(self.model_tags))


def load_manifest(path: str | Path) -> Manifest:
    path = Path(path)
    records: list[UtteranceRecord] = []
    seen: set[str] = set()
    tags: list[str] | None = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            try:
                rec = UtteranceRecord(
                    id=obj["id"], transcript=obj["transcript"], features=dict(obj["features"])
                )
            except (KeyError, TypeError) as exc:
                raise FormatError(f"{path}:{lineno}: missing manifest field: {exc}") from exc
            if not rec.id:
                raise FormatError(f"{path}:{lineno}: empty utterance id")
            if rec.id in seen:
                raise FormatError(f"{path}:{lineno}: duplicate utterance id {rec.id!r}")
            seen.add(rec.id)
            if tags is None:
                tags = list(rec.features.keys())
            elif set(rec.features.keys()) != set(tags):
                raise FormatError(
                    f"{path}:{lineno}: record {rec.id!r} has tags "
                    f"{sorted(rec.features)} but manifest uses {sorted(tags)}"
                )
            records.append(rec)
    return Manifest(root=path.parent, records=records, model_tags=tags or [])


def save_manifest(manifest: Manifest, path: str | Path) -> None:
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        for rec in manifest.records:
            features = {tag: rec.features[tag] for tag in manifest.model_tags}
            obj = {"id": rec.id, "transcript": rec.transcript, "features": features}
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def load_record_features(
    manifest: Manifest, record: UtteranceRecord, tags: list[str]
) -> list[FeatureMatrix]:
    """Load this record's feature matrices for ``tags``, in that order."""
    mats = []
    for tag in tags:
        fm = read_features(manifest.feature_path(record, tag))
        if fm.model_tag != tag:
            raise FormatError(
                f"{record.id}: file for tag {tag!r} carries model_tag {fm.model_tag!r}"
            )
        mats.append(fm)
    return mats


def verify_manifest(manifest: Manifest) -> None:
    """Check every referenced feature file exists and parses with a matching tag."""
    if not manifest.records:
        raise EmptyCorpus("manifest has no records")
    for rec in manifest.records:
        load_record_features(manifest, rec, manifest.model_tags)
