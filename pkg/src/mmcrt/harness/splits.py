"""Deterministic stratified k-fold splitting."""

from __future__ import annotations

import numpy as np

from mmcrt.errors import InputValidationError


def derive_seed(seed: int, *indices) -> int:
    """Independent per-(fold, cell, ...) seeds from one experiment seed."""
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(i) for i in indices))
    return int(ss.generate_state(1)[0])


def stratified_kfold(labels, k: int, seed: int) -> list:
    """k disjoint (train_idx, test_idx) pairs with per-class proportions kept.

    Every fold must retain both classes in train and test; raises otherwise.
    """
    y = np.asarray(labels)
    if k < 2:
        raise InputValidationError(f"need at least 2 folds, got {k}")
    rng = np.random.default_rng(derive_seed(seed, 0xF01D))
    folds = [[] for _ in range(k)]
    cursor = 0  # rotate per-class remainders so fold totals stay balanced
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        idx = idx[rng.permutation(idx.size)]
        base, rem = divmod(idx.size, k)
        counts = [base + (1 if (f - cursor) % k < rem else 0) for f in range(k)]
        start = 0
        for f in range(k):
            folds[f].extend(int(i) for i in idx[start:start + counts[f]])
            start += counts[f]
        cursor = (cursor + rem) % k
    splits = []
    all_idx = set(range(y.size))
    for f in folds:
        test = sorted(f)
        train = sorted(all_idx - set(test))
        if len(set(y[test].tolist())) < 2 or len(set(y[train].tolist())) < 2:
            raise InputValidationError(
                f"cohort too small for a stratified {k}-fold split with both classes per fold")
        splits.append((np.array(train), np.array(test)))
    return splits
