from .batch import PaddedBatch, pad_batch
from .checkpoint import CheckpointMeta, load_checkpoint, rebuild_combiner, save_checkpoint
from .encoder import (
    EncoderConfig,
    encoder_backward,
    encoder_forward,
    expected_param_shapes,
    init_params,
    sinusoidal_positions,
)
from .head import head_backward, head_forward
from .params import ParamStore

__all__ = [
    "CheckpointMeta",
    "EncoderConfig",
    "PaddedBatch",
    "ParamStore",
    "encoder_backward",
    "encoder_forward",
    "expected_param_shapes",
    "head_backward",
    "head_forward",
    "init_params",
    "load_checkpoint",
    "pad_batch",
    "rebuild_combiner",
    "save_checkpoint",
    "sinusoidal_positions",
]
