import numpy as np
import pytest

from ensembleasr.features import FeatureMatrix


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_logits(rng, T, V, scale=2.0):
    return rng.normal(0.0, scale, size=(T, V)).astype(np.float64)


def make_matrix(rng, frames, dim, tag="m0", stride=20.0):
    values = rng.normal(0.0, 1.0, size=(frames, dim)).astype(np.float32)
    return FeatureMatrix(model_tag=tag, frame_stride_ms=stride, values=values)
