"""Ensembling frozen per-frame speech features for lightweight recognizers.

Combine embeddings from several upstream feature extractors (concatenation,
sum, learned weighted average, or per-frame attention over models), train a
small head (linear or transformer encoder) with a CTC objective on top, decode
greedily, and score word/character error rates. Upstream features are read
from a binary file format and never modified.
"""

from .combiners import CombinerKind, CombinerParams, combine, combined_dim, init_combiner_params
from .ctc import Vocab, collapse, ctc_brute_force, ctc_loss_grad, greedy_decode, log_softmax
from .features import FeatureMatrix, align_frames, read_features, write_features
from .manifest import Manifest, UtteranceRecord, load_manifest, save_manifest
from .nn import (
    CheckpointMeta,
    EncoderConfig,
    ParamStore,
    load_checkpoint,
    save_checkpoint,
)
from .scoring import WerBreakdown, edit_distance, evaluate, format_report, score_corpus
from .synth import SynthConfig, synth_corpus
from .trainer import TrainConfig, TrainReport, build_vocab, train

__version__ = "1.0.0"

__all__ = [
    "CheckpointMeta",
    "CombinerKind",
    "CombinerParams",
    "EncoderConfig",
    "FeatureMatrix",
    "Manifest",
    "ParamStore",
    "SynthConfig",
    "TrainConfig",
    "TrainReport",
    "UtteranceRecord",
    "Vocab",
    "WerBreakdown",
    "align_frames",
    "build_vocab",
    "collapse",
    "combine",
    "combined_dim",
    "ctc_brute_force",
    "ctc_loss_grad",
    "edit_distance",
    "evaluate",
    "format_report",
    "greedy_decode",
    "init_combiner_params",
    "load_checkpoint",
    "load_manifest",
    "log_softmax",
    "read_features",
    "save_checkpoint",
    "save_manifest",
    "score_corpus",
    "synth_corpus",
    "train",
    "write_features",
]
