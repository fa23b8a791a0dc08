"""Deterministic batched 2D layers: conv (3x3, stride 1, same padding), ReLU,
2x2 ceil-mode max pooling, global average pooling, and a linear map.

Layers are explicit forward/backward function pairs over plain torch tensors
(NCHW activations, no autograd anywhere); each forward returns a cache that
the matching hand-written backward consumes. Float32 for training, float64
for gradient checks; dtype follows the parameters.
"""

from __future__ import annotations

import torch
import torch.nn.functional as F

from mmcrt.errors import InputValidationError


def conv2d_forward(x: torch.Tensor, weights: torch.Tensor, bias: torch.Tensor):
    """Same-padding 3x3 convolution; x (B, C, H, W), weights (F, C, 3, 3)."""
    if weights.shape[1:] != (x.shape[1], 3, 3):
        raise InputValidationError(
            f"conv weights {tuple(weights.shape)} do not match input channels {x.shape[1]}")
    out = F.conv2d(x, weights, bias, stride=1, padding=1)
    return out, (x, weights)


def conv2d_backward(cache, dout: torch.Tensor, need_dx: bool = True):
    """Returns (dweights, dbias, dx); dx is None when not requested."""
    x, weights = cache
    dx, dw, db = torch.ops.aten.convolution_backward(
        dout, x, weights, [weights.shape[0]], [1, 1], [1, 1], [1, 1],
        False, [0, 0], 1, [need_dx, True, True])
    return dw, db, dx


def relu_forward(x: torch.Tensor):
    return torch.clamp_min(x, 0), x


def relu_backward(cache, dout: torch.Tensor):
    return dout * (cache > 0)


def maxpool2_forward(x: torch.Tensor):
    """2x2 max pool, stride 2, ceil mode: odd trailing rows/cols keep a clipped
    window over valid entries only. Ties resolve to the earliest index."""
    out, idx = F.max_pool2d(x, 2, 2, ceil_mode=True, return_indices=True)
    return out, (idx, x.shape)


def maxpool2_backward(cache, dout: torch.Tensor):
    idx, in_shape = cache
    b, c = in_shape[0], in_shape[1]
    flat = torch.zeros((b, c, in_shape[2] * in_shape[3]), dtype=dout.dtype)
    flat.scatter_(2, idx.reshape(b, c, -1), dout.reshape(b, c, -1))
    return flat.reshape(in_shape)


def global_avgpool_forward(x: torch.Tensor):
    return x.mean(dim=(2, 3)), x.shape


def global_avgpool_backward(cache, dout: torch.Tensor):
    b, c, h, w = cache
    return (dout / (h * w))[:, :, None, None].expand(b, c, h, w).contiguous()


def linear_forward(x: torch.Tensor, weights: torch.Tensor, bias: torch.Tensor):
    """x (B, D) -> (B, K) with weights (K, D)."""
    return x @ weights.T + bias, (x, weights)


def linear_backward(cache, dout: torch.Tensor):
    x, weights = cache
    dw = dout.T @ x
    db = dout.sum(dim=0)
    dx = dout @ weights
    return dw, db, dx
