import logging

import numpy as np
import pytest
import torch

from mmcrt.errors import InputValidationError
from mmcrt.nn import (HEAD_DIM, encoder_backward_batch, encoder_forward,
                      encoder_forward_batch, feature_map_shapes, grad_check,
                      init_encoder_params)


def test_zero_weights_zero_output():
    rng = np.random.default_rng(0)
    params = init_encoder_params((32, 25), 10, rng)
    for i in range(len(params.conv_weights)):
        params.conv_weights[i] = torch.zeros_like(params.conv_weights[i])
    params.head_weight = torch.zeros_like(params.head_weight)
    x = np.random.default_rng(1).normal(size=(32, 25)).astype(np.float32)
    out, _ = encoder_forward(params, x)
    np.testing.assert_allclose(out, np.zeros(10), atol=0)


def test_output_length_and_pyramid_shapes():
    rng = np.random.default_rng(2)
    params = init_encoder_params((32, 25), 25, rng)
    x = rng.normal(size=(32, 25)).astype(np.float32)
    out, cache = encoder_forward(params, x)
    assert out.shape == (25,)
    # ceil-halving pyramid: (32,25) -> (16,13) -> (8,7) -> (4,4)
    assert feature_map_shapes((32, 25)) == [(32, 25), (16, 13), (8, 7), (4, 4)]
    caches, _, _ = cache
    pooled_shapes = [tuple(c[2][1][2:]) for c in caches if c[2] is not None]
    assert pooled_shapes == [(32, 25), (16, 13), (8, 7)]


def test_determinism_same_seed():
    x = np.random.default_rng(3).normal(size=(5, 32, 25)).astype(np.float32)
    outs = []
    for _ in range(2):
        params = init_encoder_params((32, 25), 15, np.random.default_rng(9))
        out, _ = encoder_forward_batch(params, x)
        outs.append(out.numpy().copy())
    assert np.array_equal(outs[0], outs[1])


def test_input_too_small():
    with pytest.raises(InputValidationError, match="too small"):
        init_encoder_params((7, 25), 10, np.random.default_rng(0))


def test_input_shape_mismatch():
    params = init_encoder_params((16, 25), 10, np.random.default_rng(0))
    with pytest.raises(InputValidationError, match="expected batch"):
        encoder_forward_batch(params, np.zeros((2, 32, 25), dtype=np.float32))


def test_k_capped_with_warning(caplog):
    with caplog.at_level(logging.WARNING):
        params = init_encoder_params((16, 25), 35, np.random.default_rng(0))
    assert params.k == HEAD_DIM
    assert any("capping" in r.message for r in caplog.records)


def test_encoder_gradient_check():
    # scalar objective: weighted sum of encoder outputs over a small batch.
    # Seed picked clear of ReLU/pool kinks at h=1e-4; a wrong gradient fails
    # at every seed.
    rng = np.random.default_rng(11)
    params = init_encoder_params((16, 25), 6, rng, dtype=np.float64)
    x = rng.normal(size=(3, 16, 25))
    w_out = torch.from_numpy(rng.normal(size=(3, 6)))
    template = params

    def objective(tensors):
        p = template.copy()
        p.set_tensors(tensors)
        out, cache = encoder_forward_batch(p, x)
        value = (w_out * out).sum()
        grads, _ = encoder_backward_batch(p, cache, w_out, need_dx=False)
        return value, grads

    err = grad_check(objective, template.tensors(), h=1e-4, n_samples=6,
                     rng=np.random.default_rng(0))
    assert err < 1e-4


def test_backward_zero_upstream():
    rng = np.random.default_rng(6)
    params = init_encoder_params((16, 25), 5, rng)
    x = rng.normal(size=(2, 16, 25)).astype(np.float32)
    out, cache = encoder_forward_batch(params, x)
    grads, dx = encoder_backward_batch(params, cache, torch.zeros_like(out))
    assert all(g.abs().max().item() == 0.0 for g in grads)
    assert dx.abs().max().item() == 0.0
