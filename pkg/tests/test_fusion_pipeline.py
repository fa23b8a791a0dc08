import numpy as np
import pytest
import torch

from mmcrt.errors import InputValidationError
from mmcrt.cca import CcaConfig, TrainConfig, train_dcca
from mmcrt.classify import (ClassifierBundle, FusionConfig, SvmConfig, fit_classifier,
                            fuse, load_bundle, predict_cohort, predict_fused,
                            predict_single_view, save_bundle)
from mmcrt.dataset import (LatentSequence, PairedCohort, PairedSubject, SynthConfig,
                           View, generate_cohort)

torch.set_num_threads(1)


def test_fuse_basic():
    assert np.array_equal(fuse([1.0, 3.0], [3.0, 1.0]), [2.0, 2.0])
    v = np.array([0.5, -1.0, 2.0])
    assert np.array_equal(fuse(v, v), v)
    assert np.array_equal(fuse(v, -v), np.zeros(3))


def test_fuse_linear_in_scale():
    rng = np.random.default_rng(0)
    v1, v2 = rng.normal(size=(2, 6))
    cfg = FusionConfig(0.3, 0.7)
    np.testing.assert_allclose(fuse(2.5 * v1, 2.5 * v2, cfg), 2.5 * fuse(v1, v2, cfg))


def test_fusion_config_validation():
    with pytest.raises(InputValidationError):
        FusionConfig(0.6, 0.6)
    with pytest.raises(InputValidationError):
        FusionConfig(-0.1, 1.1)


def test_fuse_length_mismatch():
    with pytest.raises(InputValidationError):
        fuse(np.zeros(3), np.zeros(4))


@pytest.fixture(scope="module")
def trained_bundle():
    cohort, _ = generate_cohort(SynthConfig(n_subjects=60, n_responders=38,
                                            shared_strength=5.0, seed=23))
    train = cohort.subset(range(40))
    test = cohort.subset(range(40, 60))
    dcca = train_dcca(train, CcaConfig(k=10), TrainConfig(lr=0.01, epochs=50), seed=2)
    bundle = fit_classifier(dcca, train, SvmConfig(gamma=0.01, C=10.0))
    return train, test, bundle


def test_end_to_end_classification_beats_chance(trained_bundle):
    train, test, bundle = trained_bundle
    labels = test.labels
    preds = predict_cohort(bundle, test, "fused")
    acc = (preds == labels).mean()
    assert acc >= 0.75


def test_single_view_close_to_fused(trained_bundle):
    # balanced accuracy of either single view within 10 points of fused
    train, test, bundle = trained_bundle

    def bacc(preds, labels):
        pos = labels == 1
        return 50.0 * ((preds[pos] == 1).mean() + (preds[~pos] == 0).mean())

    labels = test.labels
    fused = bacc(predict_cohort(bundle, test, "fused"), labels)
    for view in (View.A, View.B):
        single = bacc(predict_cohort(bundle, test, view), labels)
        assert abs(single - fused) <= 10.0


def test_duplicated_view_single_equals_fused(trained_bundle):
    # when view B duplicates view A and both branches share weights and
    # projections, single-view-A inference is exactly the fused prediction
    train, _, bundle = trained_bundle
    dcca = bundle.dcca
    dcca_dup = type(dcca)(dcca.params_a, dcca.params_a.copy(), dcca.proj_a,
                          dcca.proj_a.copy(), dcca.mean_a, dcca.mean_a.copy(),
                          dcca.rho, dcca.config,
                          (dcca.input_dims[0], dcca.input_dims[0], dcca.input_dims[2]))
    subjects = []
    for s in train.subjects:
        dup_b = LatentSequence(s.view_a.values.copy(), s.subject_id, View.B)
        subjects.append(PairedSubject(s.subject_id, s.view_a, dup_b, s.label))
    dup_cohort = PairedCohort(tuple(subjects))
    dup_bundle = fit_classifier(dcca_dup, dup_cohort, SvmConfig(gamma=0.01, C=10.0))
    for s in dup_cohort.subjects[:8]:
        fused_label, fused_dec = predict_fused(dup_bundle, s.view_a, s.view_b)
        single_label, single_dec = predict_single_view(dup_bundle, s.view_a, View.A)
        assert fused_label == single_label
        assert fused_dec == single_dec


def test_view_shape_mismatch_rejected(trained_bundle):
    train, _, bundle = trained_bundle
    bad = train.subjects[0].view_a.values[:5]
    with pytest.raises(InputValidationError):
        predict_single_view(bundle, bad, View.A)


def test_bundle_round_trip(tmp_path, trained_bundle):
    train, test, bundle = trained_bundle
    path = tmp_path / "model.bundle"
    save_bundle(bundle, path)
    back = load_bundle(path)
    s = test.subjects[0]
    orig_label, orig_dec = predict_fused(bundle, s.view_a, s.view_b)
    back_label, back_dec = predict_fused(back, s.view_a, s.view_b)
    assert back_label == orig_label
    # encoder weights and projections are stored as f32; the whitening
    # projections amplify that rounding into the ~1e-3 decision range
    assert abs(back_dec - orig_dec) < 1e-3
    for view in (View.A, View.B):
        assert (predict_single_view(back, s.sequence(view), view)[0]
                == predict_single_view(bundle, s.sequence(view), view)[0])
