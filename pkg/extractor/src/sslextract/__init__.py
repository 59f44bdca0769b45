from .audio import load_wav_mono_16k
from .errors import (
    AudioError,
    ExtractorError,
    ModelLoadError,
    SampleRateError,
    TranscriptMismatch,
)
from .extract import FRAME_STRIDE_MS, ExtractJob, extract, pair_utterances, read_transcripts
from .feature_io import write_features

__all__ = [
    "AudioError",
    "ExtractJob",
    "ExtractorError",
    "FRAME_STRIDE_MS",
    "ModelLoadError",
    "SampleRateError",
    "TranscriptMismatch",
    "extract",
    "load_wav_mono_16k",
    "pair_utterances",
    "read_transcripts",
    "write_features",
]
