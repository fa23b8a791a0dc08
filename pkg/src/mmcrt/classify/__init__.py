from mmcrt.classify.fusion import FusionConfig, fuse
from mmcrt.classify.svm import (SvmConfig, SvmModel, rbf_gram, rbf_kernel,
                                svm_decision, svm_predict, svm_train)
from mmcrt.classify.pipeline import (ClassifierBundle, Standardizer, bundle_from_bytes,
                                     bundle_to_bytes, decision_values, fit_classifier,
                                     load_bundle, predict_cohort, predict_fused,
                                     predict_single_view, save_bundle)

__all__ = [
    "FusionConfig", "fuse",
    "SvmConfig", "SvmModel", "rbf_gram", "rbf_kernel", "svm_decision",
    "svm_predict", "svm_train",
    "ClassifierBundle", "Standardizer", "bundle_from_bytes", "bundle_to_bytes",
    "decision_values", "fit_classifier", "load_bundle", "predict_cohort",
    "predict_fused", "predict_single_view", "save_bundle",
]
