"""Run audio through a frozen pretrained speech model and dump its features.

Loads a published (or local) checkpoint through ``transformers.AutoModel``,
which resolves to the bare encoder: for CTC-fine-tuned checkpoints that is
the model *without* its output projection, so the dumped activations are the
final hidden layer in every case. Extraction is inference-only; nothing in
the checkpoint is modified.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .audio import load_wav_mono_16k
from .errors import ModelLoadError, TranscriptMismatch
from .feature_io import write_features
from .manifest_io import load_records, merge_records, write_records

FRAME_STRIDE_MS = 20.0  # the wav2vec2 conv front end: 320 samples at 16 kHz


@dataclass
class ExtractJob:
    model_id: str
    audio_dir: Path
    transcript_file: Path
    out_dir: Path
    layer: str = "last"

    def __post_init__(self):
        self.audio_dir = Path(self.audio_dir)
        self.transcript_file = Path(self.transcript_file)
        self.out_dir = Path(self.out_dir)

    def validate(self) -> None:
        if not self.model_id:
            raise ValueError("model_id must be non-empty")
        if self.layer != "last":
            raise ValueError(f"only layer='last' is supported, got {self.layer!r}")


def read_transcripts(path: str | Path) -> dict[str, str]:
    """Parse ``id<TAB>transcript`` lines; ids must be unique."""
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if "\t" not in line:
                raise TranscriptMismatch(f"{path}:{lineno}: expected id<TAB>transcript")
            uid, transcript = line.split("\t", 1)
            if not uid:
                raise TranscriptMismatch(f"{path}:{lineno}: empty utterance id")
            if uid in out:
                raise TranscriptMismatch(f"{path}:{lineno}: duplicate utterance id {uid!r}")
            out[uid] = transcript
    return out


def pair_utterances(audio_dir: Path, transcripts: dict[str, str]) -> list[tuple[str, Path]]:
    """Match *.wav files (by stem) to transcript lines, both ways."""
    wavs = {p.stem: p for p in sorted(audio_dir.glob("*.wav"))}
    untranscribed = sorted(wavs.keys() - transcripts.keys())
    missing_audio = sorted(transcripts.keys() - wavs.keys())
    if untranscribed or missing_audio:
        raise TranscriptMismatch(
            f"audio files without transcripts {untranscribed}, "
            f"transcripts without audio {missing_audio}"
        )
    if not wavs:
        raise TranscriptMismatch(f"no .wav files in {audio_dir}")
    return [(uid, wavs[uid]) for uid in sorted(wavs)]


def _safe_dirname(model_id: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", model_id).strip("_") or "model"


def _load_model(model_id: str):
    import torch
    from transformers import AutoModel
    from transformers.utils import logging as hf_logging

    hf_logging.disable_progress_bar()
    try:
        model = AutoModel.from_pretrained(model_id)
    except Exception as exc:
        raise ModelLoadError(f"cannot load checkpoint {model_id!r}: {exc}") from exc
    model.eval()
    for p in model.parameters():
        p.requires_grad_(False)
    return model, torch


def extract(job: ExtractJob) -> Path:
    """Write one feature file per utterance plus a merged manifest.

    Returns the manifest path. Re-running with the same model replaces that
    model's files; running with a second model adds a stream to every record.
    """
    job.validate()
    transcripts = read_transcripts(job.transcript_file)
    pairs = pair_utterances(job.audio_dir, transcripts)
    model, torch = _load_model(job.model_id)
    hidden = int(model.config.hidden_size)

    subdir = _safe_dirname(job.model_id)
    utterances: dict[str, tuple[str, str]] = {}
    with torch.inference_mode():
        for uid, wav_path in pairs:
            wave = load_wav_mono_16k(wav_path)
            out = model(torch.from_numpy(wave)[None, :]).last_hidden_state
            values = out[0].numpy().astype(np.float32)
            if values.shape[1] != hidden:
                raise ModelLoadError(
                    f"{job.model_id}: output width {values.shape[1]} contradicts "
                    f"the checkpoint's hidden size {hidden}"
                )
            rel = f"features/{subdir}/{uid}.sslf"
            write_features(job.out_dir / rel, job.model_id, FRAME_STRIDE_MS, values)
            utterances[uid] = (transcripts[uid], rel)

    manifest_path = job.out_dir / "manifest.jsonl"
    existing = load_records(manifest_path) if manifest_path.exists() else []
    write_records(manifest_path, merge_records(existing, utterances, job.model_id))
    return manifest_path
