"""The two-branch encoder architecture: six 3x3 conv layers (8,8,16,16,32,32
channels) with ReLU, a 2x2 max pool after each channel pair, global average
pooling, and a linear head projecting the pooled channels to the canonical
output size.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import torch

from mmcrt.errors import InputValidationError
from mmcrt.nn import layers

log = logging.getLogger(__name__)

CHANNEL_PLAN = (8, 8, 16, 16, 32, 32)
POOL_AFTER = (1, 3, 5)          # conv indices (0-based) followed by a pool stage
HEAD_DIM = CHANNEL_PLAN[-1]
MIN_SPATIAL = 8

_DTYPES = {np.float32: torch.float32, np.float64: torch.float64,
           torch.float32: torch.float32, torch.float64: torch.float64}


@dataclass(frozen=True)
class EncoderSpec:
    channels: tuple = CHANNEL_PLAN
    kernel: int = 3
    stride: int = 1
    pool_after: tuple = POOL_AFTER
    head_dim: int = HEAD_DIM


@dataclass
class EncoderParams:
    """Ordered weight/bias tensors for one view's branch."""

    conv_weights: list
    conv_biases: list
    head_weight: torch.Tensor
    head_bias: torch.Tensor
    input_shape: tuple
    k: int
    spec: EncoderSpec = field(default_factory=EncoderSpec)

    def tensors(self) -> list:
        out = []
        for w, b in zip(self.conv_weights, self.conv_biases):
            out.extend([w, b])
        out.extend([self.head_weight, self.head_bias])
        return out

    def set_tensors(self, tensors: list) -> None:
        n = len(self.conv_weights)
        for i in range(n):
            self.conv_weights[i] = tensors[2 * i]
            self.conv_biases[i] = tensors[2 * i + 1]
        self.head_weight = tensors[2 * n]
        self.head_bias = tensors[2 * n + 1]

    def copy(self) -> "EncoderParams":
        return EncoderParams([w.clone() for w in self.conv_weights],
                             [b.clone() for b in self.conv_biases],
                             self.head_weight.clone(), self.head_bias.clone(),
                             self.input_shape, self.k, self.spec)

    def astype(self, dtype) -> "EncoderParams":
        td = _DTYPES[dtype]
        return EncoderParams([w.to(td) for w in self.conv_weights],
                             [b.to(td) for b in self.conv_biases],
                             self.head_weight.to(td), self.head_bias.to(td),
                             self.input_shape, self.k, self.spec)


def effective_k(k: int, head_dim: int = HEAD_DIM) -> int:
    """Cap the canonical output size at the pooled channel count."""
    if k > head_dim:
        log.warning("k=%d exceeds the %d pooled channels; capping", k, head_dim)
        return head_dim
    return k


def init_encoder_params(input_shape, k: int, rng: np.random.Generator,
                        dtype=np.float32) -> EncoderParams:
    """Kaiming fan-in initialisation for the ReLU conv stack, seeded by ``rng``."""
    h, w = input_shape
    if h < MIN_SPATIAL or w < MIN_SPATIAL:
        raise InputValidationError(
            f"input {h}x{w} too small for three pooling stages (need >= {MIN_SPATIAL} per axis)")
    if k < 1:
        raise InputValidationError(f"k must be >= 1, got {k}")
    k = effective_k(k)
    td = _DTYPES[dtype]
    conv_w, conv_b = [], []
    in_ch = 1
    for out_ch in CHANNEL_PLAN:
        fan_in = in_ch * 9
        w_arr = rng.normal(size=(out_ch, in_ch, 3, 3)) * np.sqrt(2.0 / fan_in)
        conv_w.append(torch.from_numpy(w_arr).to(td))
        conv_b.append(torch.zeros(out_ch, dtype=td))
        in_ch = out_ch
    head = rng.normal(size=(k, HEAD_DIM)) * np.sqrt(1.0 / HEAD_DIM)
    return EncoderParams(conv_w, conv_b, torch.from_numpy(head).to(td),
                         torch.zeros(k, dtype=td), (h, w), k)


def _as_batch_tensor(x, dtype) -> torch.Tensor:
    if isinstance(x, torch.Tensor):
        return x.to(dtype)
    arr = np.ascontiguousarray(x)
    if not arr.flags.writeable:
        arr = arr.copy()
    return torch.from_numpy(arr).to(dtype)


def encoder_forward_batch(params: EncoderParams, x):
    """Encode a batch (B, H, W) -> (B, k) tensor; returns (output, cache)."""
    xt = _as_batch_tensor(x, params.head_weight.dtype)
    if xt.ndim != 3 or tuple(xt.shape[1:]) != tuple(params.input_shape):
        raise InputValidationError(
            f"expected batch of {params.input_shape} inputs, got {tuple(xt.shape)}")
    a = xt[:, None, :, :]
    caches = []
    for i, (w, b) in enumerate(zip(params.conv_weights, params.conv_biases)):
        a, conv_cache = layers.conv2d_forward(a, w, b)
        a, relu_cache = layers.relu_forward(a)
        pool_cache = None
        if i in params.spec.pool_after:
            a, pool_cache = layers.maxpool2_forward(a)
        caches.append((conv_cache, relu_cache, pool_cache))
    pooled, gap_cache = layers.global_avgpool_forward(a)
    out, head_cache = layers.linear_forward(pooled, params.head_weight, params.head_bias)
    if not torch.all(torch.isfinite(out)):
        raise InputValidationError("encoder produced non-finite outputs")
    return out, (caches, gap_cache, head_cache)


def encoder_backward_batch(params: EncoderParams, cache, dout, need_dx: bool = True):
    """Backprop through the encoder; returns (grad tensors in tensors() order, dx)."""
    caches, gap_cache, head_cache = cache
    if not isinstance(dout, torch.Tensor):
        dout = torch.from_numpy(np.ascontiguousarray(dout)).to(params.head_weight.dtype)
    dhead_w, dhead_b, dpooled = layers.linear_backward(head_cache, dout)
    da = layers.global_avgpool_backward(gap_cache, dpooled)
    conv_grads = [None] * len(caches)
    for i in range(len(caches) - 1, -1, -1):
        conv_cache, relu_cache, pool_cache = caches[i]
        if pool_cache is not None:
            da = layers.maxpool2_backward(pool_cache, da)
        da = layers.relu_backward(relu_cache, da)
        dw, db, da = layers.conv2d_backward(conv_cache, da, need_dx=(need_dx or i > 0))
        conv_grads[i] = (dw, db)
    grads = []
    for dw, db in conv_grads:
        grads.extend([dw, db])
    grads.extend([dhead_w, dhead_b])
    dx = da[:, 0, :, :] if da is not None else None
    return grads, dx


def encoder_forward(params: EncoderParams, matrix):
    """Encode a single latent matrix (H, W) -> numpy vector (k,); returns (vector, cache)."""
    mat = np.asarray(matrix, dtype=np.float64 if params.head_weight.dtype == torch.float64
                     else np.float32)
    if mat.ndim != 2:
        raise InputValidationError(f"encoder input must be 2D, got shape {mat.shape}")
    out, cache = encoder_forward_batch(params, mat[None, :, :])
    return out[0].numpy(), cache


def feature_map_shapes(input_shape) -> list:
    """Spatial shapes after each pool stage: three ceil-halvings of (H, W)."""
    h, w = input_shape
    shapes = [(h, w)]
    for _ in range(3):
        h, w = (h + 1) // 2, (w + 1) // 2
        shapes.append((h, w))
    return shapes
