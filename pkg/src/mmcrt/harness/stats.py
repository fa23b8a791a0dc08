"""Paired two-sided Student's t-test on fold-wise accuracies."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from mmcrt.errors import InputValidationError


@dataclass(frozen=True)
class TtestResult:
    t: float
    significant: bool
    dof: int
    critical: float
    confidence: float
    degenerate: bool = False

    def as_dict(self) -> dict:
        return {"t": None if math.isinf(self.t) else round(self.t, 4),
                "significant": self.significant, "dof": self.dof,
                "critical": round(self.critical, 4), "confidence": self.confidence,
                "degenerate": self.degenerate}


def paired_ttest(acc_a, acc_b, confidence: float = 0.99) -> TtestResult:
    """Two-sided paired t-test; significant iff |t| exceeds the critical value
    at n-1 degrees of freedom.

    Zero-variance nonzero differences are degenerate (infinite t, flagged);
    identical inputs give t = 0, not significant.
    """
    a = np.asarray(acc_a, dtype=np.float64)
    b = np.asarray(acc_b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise InputValidationError(f"paired samples must match: {a.shape} vs {b.shape}")
    if a.size < 2:
        raise InputValidationError("need at least 2 pairs")
    if not 0 < confidence < 1:
        raise InputValidationError(f"confidence must be in (0, 1), got {confidence}")
    d = a - b
    n = d.size
    dof = n - 1
    critical = float(sps.t.ppf(1.0 - (1.0 - confidence) / 2.0, dof))
    sd = d.std(ddof=1)
    mean = d.mean()
    if sd == 0.0:
        if mean == 0.0:
            return TtestResult(0.0, False, dof, critical, confidence)
        return TtestResult(math.copysign(math.inf, mean), True, dof, critical,
                           confidence, degenerate=True)
    t = mean / (sd / np.sqrt(n))
    return TtestResult(float(t), bool(abs(t) > critical), dof, critical, confidence)
