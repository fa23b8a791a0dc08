"""Central finite-difference verification of analytic gradients."""

from __future__ import annotations

import numpy as np
import torch

from mmcrt.errors import NumericalError


def grad_check(fn, params: list, h: float = 1e-4, n_samples: int = 30,
               rng: np.random.Generator | None = None) -> float:
    """Max relative error between analytic and central-FD gradients.

    ``fn(params) -> (value, grads)`` must be scalar-valued with gradients in
    the same tensor order as ``params``. Coordinates are sampled per tensor
    (all of them when the tensor is small). Work happens in float64.
    """
    rng = rng or np.random.default_rng(0)
    params = [torch.as_tensor(p).to(torch.float64).clone() for p in params]
    value, grads = fn(params)
    value = float(value)
    if not np.isfinite(value):
        raise NumericalError(f"objective is non-finite at the given point: {value}")
    worst = 0.0
    for ti, p in enumerate(params):
        flat = p.reshape(-1)
        n = flat.numel()
        coords = np.arange(n) if n <= n_samples else rng.choice(n, size=n_samples, replace=False)
        for ci in coords:
            orig = float(flat[ci])
            flat[ci] = orig + h
            up, _ = fn(params)
            flat[ci] = orig - h
            down, _ = fn(params)
            flat[ci] = orig
            up, down = float(up), float(down)
            if not (np.isfinite(up) and np.isfinite(down)):
                raise NumericalError("objective became non-finite during FD probing")
            fd = (up - down) / (2.0 * h)
            analytic = float(grads[ti].reshape(-1)[ci])
            rel = abs(analytic - fd) / max(abs(analytic), abs(fd), 1e-8)
            worst = max(worst, rel)
    return worst
