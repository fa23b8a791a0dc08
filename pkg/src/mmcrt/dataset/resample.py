"""Temporal resampling of latent sequences by piecewise-linear warping.

Cardiac timings are abstracted as explicit (source frame, target frame)
anchor pairs; the warp is linear between anchors and endpoints are mandatory
anchors, so the default two-anchor case is plain linear resampling.
"""

from __future__ import annotations

import numpy as np

from mmcrt.errors import InputValidationError
from mmcrt.dataset.types import CANONICAL_FRAMES, LatentSequence


def resample_temporal(seq: LatentSequence, anchor_pairs=None,
                      t_out: int = CANONICAL_FRAMES) -> LatentSequence:
    """Resample ``seq`` to ``t_out`` frames under an anchor-defined time warp.

    ``anchor_pairs`` is a list of (source index, target index) pairs, strictly
    increasing in both coordinates, whose first and last entries must map the
    endpoint frames onto each other. Defaults to the two-anchor linear warp.
    Each output column is a linear interpolation of the two adjacent source
    columns; endpoint columns are copied exactly.
    """
    if t_out < 2:
        raise InputValidationError(f"t_out must be >= 2, got {t_out}")
    t_in = seq.n_frames
    if anchor_pairs is None:
        anchor_pairs = [(0, 0), (t_in - 1, t_out - 1)]
    anchors = [(int(s), int(t)) for s, t in anchor_pairs]
    src = np.array([a[0] for a in anchors], dtype=np.float64)
    tgt = np.array([a[1] for a in anchors], dtype=np.float64)
    if np.any(np.diff(src) <= 0) or np.any(np.diff(tgt) <= 0):
        raise InputValidationError(f"anchors must be strictly increasing in both coordinates: {anchors}")
    if anchors[0] != (0, 0) or anchors[-1] != (t_in - 1, t_out - 1):
        raise InputValidationError(
            f"first/last frames must be anchors: need (0, 0) and ({t_in - 1}, {t_out - 1}), got {anchors}")

    # Invert the target->source piecewise-linear map at every output frame.
    pos = np.interp(np.arange(t_out, dtype=np.float64), tgt, src)
    lo = np.floor(pos).astype(np.int64)
    lo = np.minimum(lo, t_in - 1)
    hi = np.minimum(lo + 1, t_in - 1)
    w = pos - lo
    x = seq.values.astype(np.float64)
    out = x[:, lo] * (1.0 - w) + x[:, hi] * w
    return LatentSequence(out.astype(np.float32), seq.subject_id, seq.view)
