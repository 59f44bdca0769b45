"""Synthetic corpus generator with controllable cross-model complementarity.

Each model ``m`` only "hears" the characters in its informative set: frames
for an informative character are a fixed unit-norm template for (m, char)
plus Gaussian noise, while frames for every other character collapse onto a
single uninformative template shared across those characters, so no head can
recover them from model ``m`` alone. Complementary informative sets across
models make the ensemble strictly more informative than any single stream.

All randomness flows through seeded substreams (see ``rng``), so the same
config produces a byte-identical output tree on every run.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidConfig
from .features import FeatureMatrix, write_features
from .manifest import Manifest, UtteranceRecord, save_manifest
from .rng import RandomStream, derive_seed

_LETTERS = "abcdefghijklmnopqrstuvwxyz"

# All synthetic streams pretend to be 20 ms-hop extractors.
FRAME_STRIDE_MS = 20.0


@dataclass
class SynthConfig:
    alphabet_size: int = 8
    num_models: int = 2
    dims: tuple[int, ...] = (16, 16)
    frames_per_char: int = 4
    noise_sigma: float = 0.3
    informative_sets: tuple[str, ...] = ("abcd", "efgh")
    num_utterances: int = 100
    utterance_len_range: tuple[int, int] = (6, 10)
    seed: int = 0

    @property
    def alphabet(self) -> str:
        return _LETTERS[: self.alphabet_size]

    @property
    def model_tags(self) -> list[str]:
        return [f"m{i}" for i in range(self.num_models)]

    def validate(self) -> None:
        if self.alphabet_size < 2:
            raise InvalidConfig("alphabet_size must be >= 2")
        if self.alphabet_size > len(_LETTERS):
            raise InvalidConfig(f"alphabet_size must be <= {len(_LETTERS)}")
        if self.num_models < 1:
            raise InvalidConfig("num_models must be >= 1")
        if len(self.dims) != self.num_models:
            raise InvalidConfig(f"dims has {len(self.dims)} entries for {self.num_models} models")
        if any(d < 1 for d in self.dims):
            raise InvalidConfig("every dim must be >= 1")
        if self.frames_per_char < 1:
            raise InvalidConfig("frames_per_char must be >= 1")
        if self.noise_sigma < 0:
            raise InvalidConfig("noise_sigma must be >= 0")
        if len(self.informative_sets) != self.num_models:
            raise InvalidConfig(
                f"informative_sets has {len(self.informative_sets)} entries "
                f"for {self.num_models} models"
            )
        alphabet = set(self.alphabet)
        covered: set[str] = set()
        for i, chars in enumerate(self.informative_sets):
            if not chars:
                raise InvalidConfig(f"informative set {i} is empty")
            stray = set(chars) - alphabet
            if stray:
                raise InvalidConfig(
                    f"informative set {i} has characters outside the alphabet: "
                    f"{''.join(sorted(stray))}"
                )
            covered |= set(chars)
        uncovered = alphabet - covered
        if uncovered:
            raise InvalidConfig(
                "no informative set covers character(s): " + "".join(sorted(uncovered))
            )
        lo, hi = self.utterance_len_range
        if lo < 1 or hi < lo:
            raise InvalidConfig(f"bad utterance_len_range {self.utterance_len_range}")
        if self.num_utterances < 1:
            raise InvalidConfig("num_utterances must be >= 1")


def _unit_vector(stream: RandomStream, dim: int) -> np.ndarray:
    v = stream.gaussians(dim)
    return v / np.linalg.norm(v)


def _templates(cfg: SynthConfig, model: int) -> dict[str, np.ndarray]:
    """Per-character base vectors for one model (unit norm, float64).

    Characters outside the model's informative set all share the same
    uninformative template, keyed individually for uniform lookup.
    """
    dim = cfg.dims[model]
    informative = set(cfg.informative_sets[model])
    shared = _unit_vector(RandomStream(derive_seed(cfg.seed, "uninformative", model)), dim)
    out = {}
    for c in cfg.alphabet:
        if c in informative:
            out[c] = _unit_vector(RandomStream(derive_seed(cfg.seed, "template", model, c)), dim)
        else:
            out[c] = shared
    return out


def synth_corpus(cfg: SynthConfig, out_dir: str | Path) -> Manifest:
    """Generate feature files plus ``manifest.jsonl`` under ``out_dir``."""
    cfg.validate()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tags = cfg.model_tags
    for tag in tags:
        (out_dir / "features" / tag).mkdir(parents=True, exist_ok=True)

    templates = [_templates(cfg, m) for m in range(cfg.num_models)]
    lo, hi = cfg.utterance_len_range
    fpc = cfg.frames_per_char

    records: list[UtteranceRecord] = []
    for u in range(cfg.num_utterances):
        tstream = RandomStream(derive_seed(cfg.seed, "transcript", u))
        length = lo + int(tstream.integers(1, hi - lo + 1)[0])
        char_ids = tstream.integers(length, cfg.alphabet_size)
        transcript = "".join(cfg.alphabet[i] for i in char_ids)
        uid = f"utt{u:05d}"

        feature_paths: dict[str, str] = {}
        for m, tag in enumerate(tags):
            dim = cfg.dims[m]
            base = np.repeat(
                np.stack([templates[m][c] for c in transcript], axis=0), fpc, axis=0
            )
            nstream = RandomStream(derive_seed(cfg.seed, "noise", u, m))
            noise = nstream.gaussians(base.size).reshape(base.shape)
            values = (base + cfg.noise_sigma * noise).astype(np.float32)
            rel = f"features/{tag}/{uid}.sslf"
            write_features(out_dir / rel, FeatureMatrix(tag, FRAME_STRIDE_MS, values))
            feature_paths[tag] = rel

        records.append(UtteranceRecord(id=uid, transcript=transcript, features=feature_paths))

    manifest = Manifest(root=out_dir, records=records, model_tags=tags)
    save_manifest(manifest, out_dir / "manifest.jsonl")
    return manifest
