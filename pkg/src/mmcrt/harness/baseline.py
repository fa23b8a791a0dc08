"""Single-view convolutional baseline: a compact VGG-style classifier trained
with binary cross-entropy and on-the-fly augmentation.

Architecture: conv16-conv16-pool-conv32-conv32-pool, global average pooling,
linear logit head. Layers reuse the shared forward/backward pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from mmcrt.errors import InputValidationError
from mmcrt.dataset.augment import AugmentParams, augment_matrix
from mmcrt.dataset.types import PairedCohort, View
from mmcrt.nn import layers
from mmcrt.nn.adam import OptimState, adam_step

BASELINE_CHANNELS = (16, 16, 32, 32)
POOL_AFTER = (1, 3)


@dataclass
class BaselineModel:
    conv_weights: list
    conv_biases: list
    head_weight: torch.Tensor
    head_bias: torch.Tensor
    view: View
    input_shape: tuple

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


def _init_model(input_shape, view, rng: np.random.Generator) -> BaselineModel:
    conv_w, conv_b = [], []
    in_ch = 1
    for out_ch in BASELINE_CHANNELS:
        fan_in = in_ch * 9
        conv_w.append(torch.from_numpy(
            rng.normal(size=(out_ch, in_ch, 3, 3)) * np.sqrt(2.0 / fan_in)).float())
        conv_b.append(torch.zeros(out_ch))
        in_ch = out_ch
    head_w = torch.from_numpy(rng.normal(size=(1, in_ch)) * np.sqrt(1.0 / in_ch)).float()
    return BaselineModel(conv_w, conv_b, head_w, torch.zeros(1), View.parse(view), input_shape)


def _forward(model: BaselineModel, x: torch.Tensor):
    a = x[:, None, :, :]
    caches = []
    for i, (w, b) in enumerate(zip(model.conv_weights, model.conv_biases)):
        a, conv_cache = layers.conv2d_forward(a, w, b)
        a, relu_cache = layers.relu_forward(a)
        pool_cache = None
        if i in POOL_AFTER:
            a, pool_cache = layers.maxpool2_forward(a)
        caches.append((conv_cache, relu_cache, pool_cache))
    pooled, gap_cache = layers.global_avgpool_forward(a)
    logits, head_cache = layers.linear_forward(pooled, model.head_weight, model.head_bias)
    return logits[:, 0], (caches, gap_cache, head_cache)


def _backward(model: BaselineModel, cache, dlogits: torch.Tensor):
    caches, gap_cache, head_cache = cache
    dh_w, dh_b, dpooled = layers.linear_backward(head_cache, dlogits[:, None])
    da = layers.global_avgpool_backward(gap_cache, dpooled)
    conv_grads = [None] * len(caches)
    for i in range(len(caches) - 1, -1, -1):
        conv_cache, relu_cache, pool_cache = caches[i]
        if pool_cache is not None:
            da = layers.maxpool2_backward(pool_cache, da)
        da = layers.relu_backward(relu_cache, da)
        dw, db, da = layers.conv2d_backward(conv_cache, da, need_dx=(i > 0))
        conv_grads[i] = (dw, db)
    grads = []
    for dw, db in conv_grads:
        grads.extend([dw, db])
    grads.extend([dh_w, dh_b])
    return grads


def train_baseline_cnn(cohort: PairedCohort, view, lr: float, seed: int,
                       epochs: int = 200, batch: int = 16,
                       augment_params: AugmentParams | None = AugmentParams()) -> BaselineModel:
    """Train the single-view classifier with BCE loss; deterministic given seed.

    ``augment_params`` controls the on-the-fly training augmentation
    (translate/rotate/flip/scale, each applied with probability 0.5); pass
    None to disable. Evaluation inputs are never augmented.
    """
    if lr <= 0 or epochs < 1 or batch < 1:
        raise InputValidationError(f"bad training options: lr={lr} epochs={epochs} batch={batch}")
    view = View.parse(view)
    mats = np.stack([s.sequence(view).values for s in cohort.subjects])
    labels = cohort.labels.astype(np.float32)
    if len(set(labels.tolist())) < 2:
        raise InputValidationError("single-class cohort: baseline training needs both classes")
    n, h, w = mats.shape
    rng = np.random.default_rng(seed)
    model = _init_model((h, w), view, rng)
    state = OptimState(lr=lr)
    y = torch.from_numpy(labels)

    for epoch in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch):
            idx = order[start:start + batch]
            xs = mats[idx]
            if augment_params is not None:
                xs = np.stack([augment_matrix(m, augment_params, rng) for m in xs])
            logits, cache = _forward(model, torch.from_numpy(xs))
            prob = torch.sigmoid(logits)
            # BCE gradient wrt logits: (p - y) / batch
            dlogits = (prob - y[idx]) / len(idx)
            grads = _backward(model, cache, dlogits)
            model.set_tensors(adam_step(state, model.tensors(), grads))
    return model


def baseline_decision(model: BaselineModel, cohort: PairedCohort) -> np.ndarray:
    """Clean (un-augmented) logits for every subject of the model's view."""
    mats = np.stack([s.sequence(model.view).values for s in cohort.subjects])
    logits, _ = _forward(model, torch.from_numpy(mats))
    return logits.numpy().astype(np.float64)


def baseline_predict(model: BaselineModel, cohort: PairedCohort) -> np.ndarray:
    """Binary labels (1 = responder) from sigmoid >= 0.5, i.e. logit >= 0."""
    return (baseline_decision(model, cohort) >= 0).astype(np.int64)
