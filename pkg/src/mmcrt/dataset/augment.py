"""Image-style augmentation of latent matrices for baseline classifier training.

Each sub-transform (translate, rotate, flip, scale) is applied independently
with a fixed probability; rotation and scaling use bilinear resampling about
the matrix centre with zero fill, translation shifts with zero fill.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from mmcrt.errors import InputValidationError
from mmcrt.dataset.types import LatentSequence

MAX_TRANSLATE = 30
MAX_ROTATE = 90.0
MAX_SCALE = 0.2


@dataclass(frozen=True)
class AugmentParams:
    """Ranges for the random transforms; each is applied with probability ``prob``."""

    translate: int = MAX_TRANSLATE
    rotate: float = MAX_ROTATE
    flip: bool = True
    scale: float = MAX_SCALE
    prob: float = 0.5

    def __post_init__(self):
        if not 0 <= self.translate <= MAX_TRANSLATE:
            raise InputValidationError(f"translate range must be in [0, {MAX_TRANSLATE}], got {self.translate}")
        if not 0.0 <= self.rotate <= MAX_ROTATE:
            raise InputValidationError(f"rotate range must be in [0, {MAX_ROTATE}], got {self.rotate}")
        if not 0.0 <= self.scale <= MAX_SCALE:
            raise InputValidationError(f"scale range must be in [0, {MAX_SCALE}], got {self.scale}")
        if not 0.0 <= self.prob <= 1.0:
            raise InputValidationError(f"prob must be in [0, 1], got {self.prob}")


def translate_matrix(x: np.ndarray, dr: int, dc: int) -> np.ndarray:
    """Shift by (dr, dc) with zero fill; positive shifts move content to higher indices."""
    rows, cols = x.shape
    out = np.zeros_like(x)
    if abs(dr) >= rows or abs(dc) >= cols:
        return out
    src_r = slice(max(0, -dr), rows - max(0, dr))
    src_c = slice(max(0, -dc), cols - max(0, dc))
    dst_r = slice(max(0, dr), rows - max(0, -dr))
    dst_c = slice(max(0, dc), cols - max(0, -dc))
    out[dst_r, dst_c] = x[src_r, src_c]
    return out


def flip_matrix(x: np.ndarray) -> np.ndarray:
    """Horizontal flip (reverses the frame axis)."""
    return np.ascontiguousarray(x[:, ::-1])


def _bilinear_sample(x: np.ndarray, rows_f: np.ndarray, cols_f: np.ndarray) -> np.ndarray:
    """Sample x at fractional (row, col) grids; coordinates outside the support give 0."""
    h, w = x.shape
    r0 = np.floor(rows_f).astype(np.int64)
    c0 = np.floor(cols_f).astype(np.int64)
    fr = rows_f - r0
    fc = cols_f - c0
    out = np.zeros(rows_f.shape, dtype=np.float64)
    for dr_, dc_, wt in ((0, 0, (1 - fr) * (1 - fc)), (0, 1, (1 - fr) * fc),
                         (1, 0, fr * (1 - fc)), (1, 1, fr * fc)):
        rr = r0 + dr_
        cc = c0 + dc_
        ok = (rr >= 0) & (rr < h) & (cc >= 0) & (cc < w)
        vals = np.where(ok, x[np.clip(rr, 0, h - 1), np.clip(cc, 0, w - 1)], 0.0)
        out += wt * vals
    return out


def _centre_grid(shape):
    rows, cols = shape
    cr, cc = (rows - 1) / 2.0, (cols - 1) / 2.0
    rr, cc_grid = np.meshgrid(np.arange(rows, dtype=np.float64) - cr,
                              np.arange(cols, dtype=np.float64) - cc, indexing="ij")
    return rr, cc_grid, cr, cc


def rotate_matrix(x: np.ndarray, degrees: float) -> np.ndarray:
    """Rotate about the matrix centre by ``degrees`` with bilinear resampling, zero fill."""
    if degrees == 0.0:
        return x.copy()
    theta = math.radians(degrees)
    ct, st = math.cos(theta), math.sin(theta)
    rr, cc_grid, cr, cc = _centre_grid(x.shape)
    src_r = ct * rr + st * cc_grid + cr
    src_c = -st * rr + ct * cc_grid + cc
    return _bilinear_sample(x.astype(np.float64), src_r, src_c).astype(x.dtype)


def scale_matrix(x: np.ndarray, factor: float) -> np.ndarray:
    """Zoom about the matrix centre by ``factor`` with bilinear resampling, zero fill."""
    if factor <= 0:
        raise InputValidationError(f"scale factor must be positive, got {factor}")
    if factor == 1.0:
        return x.copy()
    rr, cc_grid, cr, cc = _centre_grid(x.shape)
    src_r = rr / factor + cr
    src_c = cc_grid / factor + cc
    return _bilinear_sample(x.astype(np.float64), src_r, src_c).astype(x.dtype)


def augment_matrix(x: np.ndarray, params: AugmentParams, rng: np.random.Generator) -> np.ndarray:
    """Apply the randomised transform stack to a raw matrix."""
    out = x
    if rng.random() < params.prob and params.translate > 0:
        dr = int(rng.integers(-params.translate, params.translate + 1))
        dc = int(rng.integers(-params.translate, params.translate + 1))
        out = translate_matrix(out, dr, dc)
    if rng.random() < params.prob and params.rotate > 0:
        out = rotate_matrix(out, float(rng.uniform(-params.rotate, params.rotate)))
    if params.flip and rng.random() < params.prob:
        out = flip_matrix(out)
    if rng.random() < params.prob and params.scale > 0:
        out = scale_matrix(out, 1.0 + float(rng.uniform(-params.scale, params.scale)))
    return np.ascontiguousarray(out, dtype=x.dtype)


def augment(seq: LatentSequence, params: AugmentParams, rng: np.random.Generator) -> LatentSequence:
    """Randomly transformed copy of ``seq``; same shape, zero fill outside the support."""
    return LatentSequence(augment_matrix(seq.values, params, rng), seq.subject_id, seq.view)
