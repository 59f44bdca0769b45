"""16 kHz mono WAV loading.

No resampling: the supported checkpoints were trained on 16 kHz input, so
anything else is rejected rather than silently converted.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from scipy.io import wavfile

from .errors import AudioError, SampleRateError

REQUIRED_RATE = 16000

# integer PCM widths scipy can hand back, with their normalizers
_PCM_SCALE = {
    np.dtype(np.int16): 2.0**15,
    np.dtype(np.int32): 2.0**31,
}


def load_wav_mono_16k(path: str | Path) -> np.ndarray:
    """Read one waveform file as float32 samples in roughly [-1, 1]."""
    path = Path(path)
    try:
        rate, data = wavfile.read(path)
    except (ValueError, OSError) as exc:
        raise AudioError(f"{path}: cannot read waveform: {exc}") from exc
    if rate != REQUIRED_RATE:
        raise SampleRateError(f"{path}: sample rate {rate} Hz, need {REQUIRED_RATE}")
    if data.ndim != 1:
        raise AudioError(f"{path}: {data.shape[1]} channels, need mono")
    if data.size == 0:
        raise AudioError(f"{path}: empty waveform")
    if data.dtype in _PCM_SCALE:
        return (data / _PCM_SCALE[data.dtype]).astype(np.float32)
    if data.dtype == np.uint8:  # 8-bit WAV is unsigned with midpoint 128
        return ((data.astype(np.float32) - 128.0) / 128.0).astype(np.float32)
    if data.dtype in (np.float32, np.float64):
        return data.astype(np.float32)
    raise AudioError(f"{path}: unsupported sample format {data.dtype}")
