"""Canonical-vector fusion: elementwise convex combination of the two views."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from mmcrt.errors import InputValidationError


@dataclass(frozen=True)
class FusionConfig:
    """Fusion weights for view A and view B; balanced by default."""

    alpha: float = 0.5
    beta: float = 0.5

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise InputValidationError(
                f"fusion weights must be non-negative, got alpha={self.alpha} beta={self.beta}")
        if abs(self.alpha + self.beta - 1.0) > 1e-9:
            raise InputValidationError(
                f"fusion weights must sum to 1, got {self.alpha + self.beta}")


def fuse(v1: np.ndarray, v2: np.ndarray, cfg: FusionConfig = FusionConfig()) -> np.ndarray:
    """F = alpha * V1 + beta * V2, elementwise."""
    v1 = np.asarray(v1, dtype=np.float64)
    v2 = np.asarray(v2, dtype=np.float64)
    if v1.shape != v2.shape:
        raise InputValidationError(f"fusion inputs differ in shape: {v1.shape} vs {v2.shape}")
    return cfg.alpha * v1 + cfg.beta * v2
