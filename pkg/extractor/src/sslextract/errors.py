class ExtractorError(Exception):
    """Base class for everything this package raises on purpose."""


class ModelLoadError(ExtractorError):
    """Checkpoint could not be loaded, or its outputs contradict its config."""


class AudioError(ExtractorError):
    """Waveform file unreadable, empty, not mono, or an unsupported format."""


class SampleRateError(AudioError):
    """Waveform is not sampled at 16 kHz."""


class TranscriptMismatch(ExtractorError):
    """Audio files and transcript lines (or manifests being merged) disagree."""
