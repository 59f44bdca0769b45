import numpy as np
import pytest
from scipy.io import wavfile

# tiny random-weight checkpoints: the real conv front end (and so the real
# frame geometry), but 2 encoder layers and narrow widths so tests run in
# seconds with no downloads
_SMALL = dict(
    num_hidden_layers=2,
    num_attention_heads=2,
    conv_dim=(16,) * 7,
    num_conv_pos_embeddings=16,
    num_conv_pos_embedding_groups=2,
)


@pytest.fixture(scope="session")
def w2v2_dir(tmp_path_factory):
    import torch
    from transformers import Wav2Vec2Config, Wav2Vec2Model

    torch.manual_seed(0)
    model = Wav2Vec2Model(Wav2Vec2Config(hidden_size=24, intermediate_size=48, **_SMALL))
    path = tmp_path_factory.mktemp("ckpt") / "w2v2-tiny"
    model.save_pretrained(path)
    return path


@pytest.fixture(scope="session")
def hubert_dir(tmp_path_factory):
    import torch
    from transformers import HubertConfig, HubertModel

    torch.manual_seed(1)
    model = HubertModel(HubertConfig(hidden_size=32, intermediate_size=64, **_SMALL))
    path = tmp_path_factory.mktemp("ckpt") / "hubert-tiny"
    model.save_pretrained(path)
    return path


UTTERANCES = [
    ("utt0", "hello there", 1.0),
    ("utt1", "yes", 0.5),
    ("utt2", "open the door", 2.0),
    ("utt3", "stop", 1.0),
]


def write_tone(path, seconds, seed, rate=16000):
    rng = np.random.default_rng(seed)
    t = np.arange(int(rate * seconds)) / rate
    wave = 0.3 * np.sin(2 * np.pi * (180 + 40 * seed) * t) + 0.05 * rng.normal(size=t.size)
    wavfile.write(path, rate, (wave * 32767).astype(np.int16))


@pytest.fixture(scope="session")
def corpus(tmp_path_factory):
    """audio/ directory plus matching transcripts.tsv."""
    root = tmp_path_factory.mktemp("corpus")
    audio = root / "audio"
    audio.mkdir()
    lines = []
    for i, (uid, transcript, seconds) in enumerate(UTTERANCES):
        write_tone(audio / f"{uid}.wav", seconds, seed=i)
        lines.append(f"{uid}\t{transcript}")
    tsv = root / "transcripts.tsv"
    tsv.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return audio, tsv
