"""Confusion counts and the BACC/SEN/SPE metric triple (responder = positive)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from mmcrt.errors import InputValidationError


@dataclass(frozen=True)
class Confusion:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise InputValidationError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def as_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn}


@dataclass(frozen=True)
class Metrics:
    """Percentages; bacc == (sen + spe) / 2 exactly before rounding."""

    bacc: float
    sen: float
    spe: float

    def as_dict(self, decimals: int = 2) -> dict:
        return {"bacc": round(self.bacc, decimals), "sen": round(self.sen, decimals),
                "spe": round(self.spe, decimals)}


def _as_sign(values) -> np.ndarray:
    arr = np.asarray(values)
    if arr.ndim != 1 or arr.size == 0:
        raise InputValidationError("labels/predictions must be non-empty 1D sequences")
    return arr > 0


def confusion(labels, preds) -> Confusion:
    """Count TP/FP/FN/TN; accepts 0/1 or -1/+1 encodings."""
    y = _as_sign(labels)
    p = _as_sign(preds)
    if y.size != p.size:
        raise InputValidationError(f"length mismatch: {y.size} labels vs {p.size} predictions")
    return Confusion(tp=int(np.sum(y & p)), fp=int(np.sum(~y & p)),
                     fn=int(np.sum(y & ~p)), tn=int(np.sum(~y & ~p)))


def metrics(c: Confusion) -> Metrics:
    """SEN = TP/(TP+FN), SPE = TN/(TN+FP), BACC = (SEN+SPE)/2, as percentages."""
    if c.tp + c.fn == 0:
        raise InputValidationError("no positive-class subjects: sensitivity undefined")
    if c.tn + c.fp == 0:
        raise InputValidationError("no negative-class subjects: specificity undefined")
    sen = 100.0 * c.tp / (c.tp + c.fn)
    spe = 100.0 * c.tn / (c.tn + c.fp)
    return Metrics(bacc=(sen + spe) / 2.0, sen=sen, spe=spe)


def bacc_from_predictions(labels, preds) -> float:
    return metrics(confusion(labels, preds)).bacc
