"""Adam optimizer over lists of parameter tensors, with bias correction."""

from __future__ import annotations

from dataclasses import dataclass, field

import torch

from mmcrt.errors import InputValidationError


@dataclass
class OptimState:
    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)
    step: int = 0


def adam_step(state: OptimState, params: list, grads: list) -> list:
    """One Adam update; mutates ``state`` and returns the updated tensors."""
    if len(params) != len(grads):
        raise InputValidationError(f"{len(params)} params vs {len(grads)} grads")
    if not state.m:
        state.m = [torch.zeros_like(p) for p in params]
        state.v = [torch.zeros_like(p) for p in params]
    state.step += 1
    t = state.step
    b1, b2 = state.beta1, state.beta2
    bias1 = 1.0 - b1 ** t
    bias2 = 1.0 - b2 ** t
    out = []
    for i, (p, g) in enumerate(zip(params, grads)):
        if p.shape != g.shape:
            raise InputValidationError(f"param {i}: shape {tuple(p.shape)} vs grad {tuple(g.shape)}")
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * g
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g
        m_hat = state.m[i] / bias1
        v_hat = state.v[i] / bias2
        out.append(p - state.lr * m_hat / (torch.sqrt(v_hat) + state.epsilon))
    return out
