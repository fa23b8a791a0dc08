"""Classification pipeline on top of a trained DCCA model: project both views,
fuse, standardize, and classify; single-view inference feeds the lone
canonical vector directly as the fused feature.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from mmcrt.errors import InputValidationError
from mmcrt.cca.train import DccaModel, dcca_from_bytes, dcca_to_bytes, project, project_cohort
from mmcrt.classify.fusion import FusionConfig, fuse
from mmcrt.classify.svm import SvmConfig, SvmModel, svm_predict, svm_decision
from mmcrt.classify.svm import svm_train as _svm_train
from mmcrt.dataset.types import PairedCohort, View

SVM_MAGIC = b"SVMF"


@dataclass
class Standardizer:
    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, xs: np.ndarray) -> "Standardizer":
        mean = xs.mean(axis=0)
        std = np.maximum(xs.std(axis=0, ddof=0), 1e-8)
        return cls(mean, std)

    def apply(self, xs: np.ndarray) -> np.ndarray:
        return (np.asarray(xs, dtype=np.float64) - self.mean) / self.std


@dataclass
class ClassifierBundle:
    """Everything needed for inference: encoders, projections, feature scaling,
    the SVM, and the fusion weights it was trained with."""

    dcca: DccaModel
    standardizer: Standardizer
    svm: SvmModel
    fusion: FusionConfig


def fit_classifier(dcca: DccaModel, cohort: PairedCohort, svm_cfg: SvmConfig,
                   fusion: FusionConfig = FusionConfig(), tol: float = 1e-3,
                   seed: int = 0) -> ClassifierBundle:
    """Train the RBF SVM on fused, standardized canonical vectors of ``cohort``."""
    v1 = project_cohort(dcca, cohort, View.A)
    v2 = project_cohort(dcca, cohort, View.B)
    fused = fusion.alpha * v1 + fusion.beta * v2
    standardizer = Standardizer.fit(fused)
    labels = np.where(cohort.labels == 1, 1.0, -1.0)
    svm = _svm_train(standardizer.apply(fused), labels, svm_cfg, tol=tol, seed=seed)
    return ClassifierBundle(dcca, standardizer, svm, fusion)


def predict_fused(bundle: ClassifierBundle, seq_a, seq_b):
    """Fused two-view prediction; returns (binary label, decision value)."""
    v1 = project(bundle.dcca, seq_a, View.A)
    v2 = project(bundle.dcca, seq_b, View.B)
    feats = bundle.standardizer.apply(fuse(v1, v2, bundle.fusion))
    label, dec = svm_predict(bundle.svm, feats)
    return (1 if label > 0 else 0), dec


def predict_single_view(bundle: ClassifierBundle, seq, view):
    """Single-view prediction: the lone canonical vector stands in for the
    fused feature (with balanced weights and correlated views, F ~ V).
    Returns (binary label, decision value)."""
    v = project(bundle.dcca, seq, view)
    feats = bundle.standardizer.apply(v)
    label, dec = svm_predict(bundle.svm, feats)
    return (1 if label > 0 else 0), dec


def decision_values(bundle: ClassifierBundle, cohort: PairedCohort, mode) -> np.ndarray:
    """Batch decision values; mode is 'fused', View.A, or View.B."""
    if mode == "fused":
        v1 = project_cohort(bundle.dcca, cohort, View.A)
        v2 = project_cohort(bundle.dcca, cohort, View.B)
        feats = bundle.fusion.alpha * v1 + bundle.fusion.beta * v2
    else:
        feats = project_cohort(bundle.dcca, cohort, View.parse(mode))
    return svm_decision(bundle.svm, bundle.standardizer.apply(feats))


def predict_cohort(bundle: ClassifierBundle, cohort: PairedCohort, mode) -> np.ndarray:
    """Batch binary labels (1 = responder) under the given inference mode."""
    return (decision_values(bundle, cohort, mode) >= 0).astype(np.int64)


# --- bundle serialization ----------------------------------------------------
# DCCA MMW1 block, then an f64 SVM section: magic, n_sv u32, k u32, then
# gamma, bias, fusion alpha, fusion beta, support vectors (n_sv*k), dual
# coefficients (n_sv), standardizer mean (k), standardizer std (k).

def bundle_to_bytes(bundle: ClassifierBundle) -> bytes:
    svm = bundle.svm
    n_sv, k = svm.support_vectors.shape
    parts = [dcca_to_bytes(bundle.dcca),
             SVM_MAGIC, struct.pack("<II", n_sv, k),
             struct.pack("<dddd", svm.gamma, svm.bias,
                         bundle.fusion.alpha, bundle.fusion.beta),
             svm.support_vectors.astype("<f8").tobytes(order="C"),
             svm.dual_coef.astype("<f8").tobytes(),
             bundle.standardizer.mean.astype("<f8").tobytes(),
             bundle.standardizer.std.astype("<f8").tobytes()]
    return b"".join(parts)


def bundle_from_bytes(blob: bytes) -> ClassifierBundle:
    dcca, offset = dcca_from_bytes(blob)
    if blob[offset:offset + 4] != SVM_MAGIC:
        raise InputValidationError("model bundle is missing the classifier section")
    offset += 4
    n_sv, k = struct.unpack_from("<II", blob, offset)
    offset += 8
    gamma, bias, alpha_w, beta_w = struct.unpack_from("<dddd", blob, offset)
    offset += 32

    def take(count):
        nonlocal offset
        arr = np.frombuffer(blob, dtype="<f8", count=count, offset=offset)
        offset += 8 * count
        return np.ascontiguousarray(arr)

    sv = take(n_sv * k).reshape(n_sv, k)
    dual = take(n_sv)
    mean = take(k)
    std = take(k)
    if offset != len(blob):
        raise InputValidationError(f"model bundle has {len(blob) - offset} trailing bytes")
    svm = SvmModel(support_vectors=sv, dual_coef=dual, bias=bias, gamma=gamma)
    return ClassifierBundle(dcca, Standardizer(mean, std), svm,
                            FusionConfig(alpha_w, beta_w))


def save_bundle(bundle: ClassifierBundle, path) -> None:
    Path(path).write_bytes(bundle_to_bytes(bundle))


def load_bundle(path) -> ClassifierBundle:
    return bundle_from_bytes(Path(path).read_bytes())
