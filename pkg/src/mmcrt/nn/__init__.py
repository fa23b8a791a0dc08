from mmcrt.nn.adam import OptimState, adam_step
from mmcrt.nn.encoder import (EncoderParams, EncoderSpec, HEAD_DIM, effective_k,
                              encoder_backward_batch, encoder_forward,
                              encoder_forward_batch, feature_map_shapes,
                              init_encoder_params)
from mmcrt.nn.gradcheck import grad_check
from mmcrt.nn import layers, snapshot

__all__ = [
    "OptimState", "adam_step",
    "EncoderParams", "EncoderSpec", "HEAD_DIM", "effective_k",
    "encoder_backward_batch", "encoder_forward", "encoder_forward_batch",
    "feature_map_shapes", "init_encoder_params",
    "grad_check", "layers", "snapshot",
]
