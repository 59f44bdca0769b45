import numpy as np
import pytest
from scipy.io import wavfile

from sslextract import AudioError, SampleRateError, load_wav_mono_16k


def test_int16_scaled_to_unit_range(tmp_path):
    path = tmp_path / "a.wav"
    wavfile.write(path, 16000, np.array([16384, -16384, 0], dtype=np.int16))
    wave = load_wav_mono_16k(path)
    assert wave.dtype == np.float32
    np.testing.assert_allclose(wave, [0.5, -0.5, 0.0])


def test_float_input_kept_as_is(tmp_path):
    path = tmp_path / "a.wav"
    wavfile.write(path, 16000, np.array([0.25, -0.75], dtype=np.float32))
    np.testing.assert_allclose(load_wav_mono_16k(path), [0.25, -0.75])


def test_uint8_recentered(tmp_path):
    path = tmp_path / "a.wav"
    wavfile.write(path, 16000, np.array([128, 255, 0], dtype=np.uint8))
    wave = load_wav_mono_16k(path)
    np.testing.assert_allclose(wave, [0.0, 127 / 128, -1.0])


def test_wrong_sample_rate_rejected(tmp_path):
    path = tmp_path / "a.wav"
    wavfile.write(path, 8000, np.zeros(100, dtype=np.int16))
    with pytest.raises(SampleRateError, match="8000"):
        load_wav_mono_16k(path)


def test_stereo_rejected(tmp_path):
    path = tmp_path / "a.wav"
    wavfile.write(path, 16000, np.zeros((100, 2), dtype=np.int16))
    with pytest.raises(AudioError, match="2 channels"):
        load_wav_mono_16k(path)


def test_garbage_file_rejected(tmp_path):
    path = tmp_path / "a.wav"
    path.write_bytes(b"this is not a waveform")
    with pytest.raises(AudioError, match="cannot read"):
        load_wav_mono_16k(path)


def test_empty_waveform_rejected(tmp_path):
    path = tmp_path / "a.wav"
    wavfile.write(path, 16000, np.zeros(0, dtype=np.int16))
    with pytest.raises(AudioError, match="empty"):
        load_wav_mono_16k(path)
