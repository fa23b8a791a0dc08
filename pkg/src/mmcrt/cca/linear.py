"""Linear CCA on sample matrices, the total-correlation objective, and its
closed-form gradient.

Views are (n, d) with rows as samples. Canonical correlations are the
singular values of the whitened cross-covariance
``T = S11^{-1/2} S12 S22^{-1/2}`` where each auto-covariance carries a ridge
``r`` (mandatory whenever n-1 < d, e.g. minibatches). The objective is the
sum of the top-k singular values; its gradient follows the classic
trace-norm derivation, truncated to the top-k singular triplets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from mmcrt.errors import InputValidationError, NumericalError

EIG_FLOOR = 1e-10
GRAM_JITTER = 1e-8
SIGMA_FLOOR = 1e-7


@dataclass(frozen=True)
class CcaConfig:
    """Canonical dimension and covariance regularization."""

    k: int
    r: float = 1e-3

    def __post_init__(self):
        if self.k < 1:
            raise InputValidationError(f"k must be >= 1, got {self.k}")
        if self.r < 0:
            raise InputValidationError(f"r must be >= 0, got {self.r}")


def _check_views(h1: np.ndarray, h2: np.ndarray, k: int):
    h1 = np.asarray(h1, dtype=np.float64)
    h2 = np.asarray(h2, dtype=np.float64)
    if h1.ndim != 2 or h2.ndim != 2:
        raise InputValidationError("views must be 2D sample matrices")
    if h1.shape[0] != h2.shape[0]:
        raise InputValidationError(f"sample counts differ: {h1.shape[0]} vs {h2.shape[0]}")
    if h1.shape[0] < 2:
        raise InputValidationError("need at least 2 samples")
    if k > min(h1.shape[1], h2.shape[1]):
        raise InputValidationError(
            f"k={k} exceeds min view dimension {min(h1.shape[1], h2.shape[1])}")
    if not (np.all(np.isfinite(h1)) and np.all(np.isfinite(h2))):
        raise NumericalError("non-finite values in view matrices")
    return h1, h2


def _inv_sqrt(sigma: np.ndarray, r: float) -> np.ndarray:
    """Symmetric inverse square root via eigendecomposition with a floor."""
    vals, vecs = np.linalg.eigh(sigma)
    if r == 0.0 and vals.min() < EIG_FLOOR:
        raise NumericalError(
            f"degenerate covariance (min eigenvalue {vals.min():.3e}) with r=0; "
            "supply a positive regularizer")
    vals = np.maximum(vals, EIG_FLOOR)
    return (vecs / np.sqrt(vals)) @ vecs.T


def _whitened_t(h1: np.ndarray, h2: np.ndarray, r: float):
    n = h1.shape[0]
    m1 = h1.mean(axis=0)
    m2 = h2.mean(axis=0)
    h1b = h1 - m1
    h2b = h2 - m2
    s11 = h1b.T @ h1b / (n - 1) + r * np.eye(h1.shape[1])
    s22 = h2b.T @ h2b / (n - 1) + r * np.eye(h2.shape[1])
    s12 = h1b.T @ h2b / (n - 1)
    isq1 = _inv_sqrt(s11, r)
    isq2 = _inv_sqrt(s22, r)
    t = isq1 @ s12 @ isq2
    return t, isq1, isq2, h1b, h2b, (m1, m2)


def linear_cca(h1: np.ndarray, h2: np.ndarray, k: int, r: float = 1e-3):
    """Fit linear CCA; returns (a1, a2, rho, (mean1, mean2)).

    ``a1`` (d1, k) and ``a2`` (d2, k) whiten the centred views so that the
    projected pairs have unit variance and correlation ``rho`` (descending,
    clipped to [0, 1]).
    """
    h1, h2 = _check_views(h1, h2, k)
    t, isq1, isq2, _, _, means = _whitened_t(h1, h2, r)
    u, s, vt = np.linalg.svd(t)
    a1 = isq1 @ u[:, :k]
    a2 = isq2 @ vt[:k].T
    rho = np.clip(s[:k], 0.0, 1.0)
    return a1, a2, rho, means


def _swap_for_canonical(h1: np.ndarray, h2: np.ndarray) -> bool:
    """Deterministic view ordering so swapped calls compute literally the same
    decomposition (exact symmetry)."""
    if h1.shape[1] != h2.shape[1]:
        return h1.shape[1] > h2.shape[1]
    b1, b2 = h1.tobytes(), h2.tobytes()
    return b1 > b2


def cca_objective(h1: np.ndarray, h2: np.ndarray, cfg: CcaConfig) -> float:
    """Total correlation: sum of the top-k singular values of T."""
    h1, h2 = _check_views(h1, h2, cfg.k)
    if _swap_for_canonical(h1, h2):
        h1, h2 = h2, h1
    t, *_ = _whitened_t(h1, h2, cfg.r)
    s = np.linalg.svd(t, compute_uv=False)
    if not np.all(np.isfinite(s)):
        raise NumericalError("non-finite singular values in whitened cross-covariance")
    return float(np.sum(s[:cfg.k]))


def _gradient_one_way(h1: np.ndarray, h2: np.ndarray, cfg: CcaConfig):
    n = h1.shape[0]
    t, isq1, isq2, h1b, h2b, _ = _whitened_t(h1, h2, cfg.r)
    # jittered Gram decomposition: stable under near-degenerate singular values
    gram = t.T @ t + GRAM_JITTER * np.eye(t.shape[1])
    mu, v = np.linalg.eigh(gram)
    order = np.argsort(mu)[::-1]
    mu = mu[order]
    v = v[:, order]
    sigma = np.sqrt(np.maximum(mu - GRAM_JITTER, 0.0))
    keep = min(cfg.k, int(np.sum(sigma > SIGMA_FLOOR)))
    v_k = v[:, :keep]
    sig_k = sigma[:keep]
    u_k = (t @ v_k) / sig_k
    d12 = isq1 @ u_k @ v_k.T @ isq2
    d11 = -0.5 * isq1 @ (u_k * sig_k) @ u_k.T @ isq1
    d22 = -0.5 * isq2 @ (v_k * sig_k) @ v_k.T @ isq2
    g1 = (2.0 * h1b @ d11 + h2b @ d12.T) / (n - 1)
    g2 = (2.0 * h2b @ d22 + h1b @ d12) / (n - 1)
    if not (np.all(np.isfinite(g1)) and np.all(np.isfinite(g2))):
        raise NumericalError(
            f"non-finite CCA gradient (top singular values {sigma[:3]})")
    return g1, g2


def cca_gradient(h1: np.ndarray, h2: np.ndarray, cfg: CcaConfig):
    """Gradients of :func:`cca_objective` w.r.t. both sample matrices."""
    h1, h2 = _check_views(h1, h2, cfg.k)
    if _swap_for_canonical(h1, h2):
        g2, g1 = _gradient_one_way(h2, h1, cfg)
    else:
        g1, g2 = _gradient_one_way(h1, h2, cfg)
    return g1, g2


def holdout_cca_correlations(h1: np.ndarray, h2: np.ndarray, k: int,
                             r: float = 1e-3) -> np.ndarray:
    """Honest estimate of canonical correlations: fit projections on the first
    half of the samples, measure per-component correlation on the second half.

    In-sample CCA saturates at rho ~ 1 whenever the view dimension reaches the
    sample count, so raw-input comparisons must use this estimator.
    """
    h1, h2 = _check_views(h1, h2, k)
    n = h1.shape[0]
    half = n // 2
    if half < 2 or n - half < 3:
        raise InputValidationError(f"need at least 5 samples for a holdout estimate, got {n}")
    a1, a2, _, (m1, m2) = linear_cca(h1[:half], h2[:half], k, r)
    p1 = (h1[half:] - m1) @ a1
    p2 = (h2[half:] - m2) @ a2
    p1 = p1 - p1.mean(axis=0)
    p2 = p2 - p2.mean(axis=0)
    num = (p1 * p2).sum(axis=0)
    den = np.sqrt((p1 ** 2).sum(axis=0) * (p2 ** 2).sum(axis=0))
    rho = np.abs(num) / np.maximum(den, 1e-12)
    return np.sort(rho)[::-1]
