"""Binary RBF-kernel SVM trained by two-coordinate dual ascent (SMO) with
max-violating-pair working-set selection.

Dual problem: minimize 1/2 a^T Q a - e^T a subject to y^T a = 0 and
0 <= a_i <= C_i, where Q = (y y^T) * K. Class-weighted boxes
C_i = C * n / (2 * n_class) compensate the responder imbalance by default.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from mmcrt.errors import InputValidationError, NumericalError

MAX_ITER = 1_000_000
SV_THRESHOLD = 1e-12


@dataclass(frozen=True)
class SvmConfig:
    gamma: float = 0.01
    C: float = 10.0
    class_weights: dict | None = None   # {+1: w, -1: w}; None = balanced from data

    def __post_init__(self):
        if self.gamma <= 0:
            raise InputValidationError(f"gamma must be positive, got {self.gamma}")
        if self.C <= 0:
            raise InputValidationError(f"C must be positive, got {self.C}")
        if self.class_weights is not None:
            if set(self.class_weights) != {1, -1} or any(w <= 0 for w in self.class_weights.values()):
                raise InputValidationError(f"class_weights must map {{+1,-1}} to positives")


@dataclass
class SvmModel:
    support_vectors: np.ndarray    # (n_sv, k)
    dual_coef: np.ndarray          # (n_sv,) alpha_i * y_i
    bias: float
    gamma: float
    alphas: np.ndarray = field(default=None, repr=False)
    box: np.ndarray = field(default=None, repr=False)
    kkt_residual: float = 0.0
    dual_objective: float = 0.0
    n_iter: int = 0


def rbf_kernel(x: np.ndarray, y: np.ndarray, gamma: float) -> float:
    """exp(-gamma * ||x - y||^2); equals 1 iff x == y."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise InputValidationError(f"kernel inputs differ in shape: {x.shape} vs {y.shape}")
    d = x - y
    return float(np.exp(-gamma * np.dot(d, d)))


def rbf_gram(xs: np.ndarray, ys: np.ndarray, gamma: float) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    sq = (xs ** 2).sum(axis=1)[:, None] + (ys ** 2).sum(axis=1)[None, :] - 2.0 * xs @ ys.T
    return np.exp(-gamma * np.maximum(sq, 0.0))


def _class_boxes(labels: np.ndarray, cfg: SvmConfig) -> np.ndarray:
    n = labels.size
    if cfg.class_weights is not None:
        weights = cfg.class_weights
    else:
        weights = {y: n / (2.0 * np.sum(labels == y)) for y in (1, -1)}
    return np.array([cfg.C * weights[int(y)] for y in labels], dtype=np.float64)


def svm_train(features: np.ndarray, labels: np.ndarray, cfg: SvmConfig,
              tol: float = 1e-3, seed: int = 0) -> SvmModel:
    """Solve the dual to KKT residual <= tol.

    The solver is fully deterministic (ties in working-set selection break by
    index); ``seed`` is accepted for interface uniformity.
    """
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if x.ndim != 2 or y.ndim != 1 or x.shape[0] != y.size:
        raise InputValidationError(f"bad shapes: features {x.shape}, labels {y.shape}")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise InputValidationError("labels must be +1/-1")
    if np.all(y == y[0]):
        raise InputValidationError("single-class input: both classes required")
    if not np.all(np.isfinite(x)):
        raise InputValidationError("non-finite feature values")

    n = y.size
    box = _class_boxes(y, cfg)
    kmat = rbf_gram(x, x, cfg.gamma)
    alpha = np.zeros(n)
    grad = -np.ones(n)                       # G = Q alpha - e at alpha = 0
    crit = -y * grad                         # working-set criterion

    n_iter = 0
    residual = np.inf
    while n_iter < MAX_ITER:
        up = ((y > 0) & (alpha < box)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < box))
        crit = -y * grad
        up_vals = np.where(up, crit, -np.inf)
        low_vals = np.where(low, crit, np.inf)
        i = int(np.argmax(up_vals))
        j = int(np.argmin(low_vals))
        residual = up_vals[i] - low_vals[j]
        if residual <= tol:
            break
        quad = kmat[i, i] + kmat[j, j] - 2.0 * kmat[i, j]
        delta = (up_vals[i] - low_vals[j]) / max(quad, 1e-12)
        delta = min(delta,
                    box[i] - alpha[i] if y[i] > 0 else alpha[i],
                    alpha[j] if y[j] > 0 else box[j] - alpha[j])
        alpha[i] += y[i] * delta
        alpha[j] -= y[j] * delta
        np.clip(alpha, 0.0, box, out=alpha)
        grad += delta * y * (kmat[:, i] - kmat[:, j])
        n_iter += 1
    else:
        raise NumericalError(
            f"SVM did not converge after {MAX_ITER} iterations (KKT residual {residual:.3e})")

    # bias: mean of -y*G over free support vectors; midpoint rule otherwise
    free = (alpha > SV_THRESHOLD) & (alpha < box - SV_THRESHOLD)
    if np.any(free):
        bias = float(np.mean((-y * grad)[free]))
    else:
        bias = float((up_vals[i] + low_vals[j]) / 2.0)

    dual_obj = 0.5 * alpha @ (kmat * np.outer(y, y)) @ alpha - alpha.sum()
    sv_mask = alpha > SV_THRESHOLD
    return SvmModel(support_vectors=x[sv_mask].copy(),
                    dual_coef=(alpha * y)[sv_mask],
                    bias=bias, gamma=cfg.gamma,
                    alphas=alpha, box=box,
                    kkt_residual=float(residual),
                    dual_objective=float(dual_obj),
                    n_iter=n_iter)


def svm_decision(model: SvmModel, xs: np.ndarray) -> np.ndarray:
    """Decision values for a batch of feature vectors (n, k)."""
    xs = np.asarray(xs, dtype=np.float64)
    if xs.ndim == 1:
        xs = xs[None, :]
    if xs.shape[1] != model.support_vectors.shape[1]:
        raise InputValidationError(
            f"feature length {xs.shape[1]} does not match support vectors "
            f"({model.support_vectors.shape[1]})")
    k = rbf_gram(xs, model.support_vectors, model.gamma)
    return k @ model.dual_coef + model.bias


def svm_predict(model: SvmModel, x: np.ndarray):
    """Returns (label, decision value); ties at 0 resolve to +1."""
    dec = float(svm_decision(model, np.asarray(x))[0])
    return (1 if dec >= 0 else -1), dec
