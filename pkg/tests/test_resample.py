import numpy as np
import pytest

from mmcrt.errors import InputValidationError
from mmcrt.dataset import LatentSequence, View, resample_temporal


def seq_of(values):
    return LatentSequence(np.asarray(values, dtype=np.float32), "s", View.A)


def brute_force_resample(x, anchors, t_out):
    """Independent per-column interpolator: walk the anchor segments explicitly."""
    out = np.zeros((x.shape[0], t_out))
    for j in range(t_out):
        for (s0, t0), (s1, t1) in zip(anchors, anchors[1:]):
            if t0 <= j <= t1:
                pos = s0 + (j - t0) * (s1 - s0) / (t1 - t0)
                break
        lo = int(np.floor(pos))
        hi = min(lo + 1, x.shape[1] - 1)
        w = pos - lo
        for d in range(x.shape[0]):
            out[d, j] = (1 - w) * x[d, lo] + w * x[d, hi]
    return out.astype(np.float32)


def test_identity_anchors_identity():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(4, 25)).astype(np.float32)
    seq = seq_of(x)
    out = resample_temporal(seq, [(0, 0), (24, 24)], t_out=25)
    assert np.array_equal(out.values, x)


def test_constant_matrix_stays_constant():
    x = np.full((3, 11), 2.5, dtype=np.float32)
    out = resample_temporal(seq_of(x), [(0, 0), (4, 13), (10, 24)], t_out=25)
    assert out.values.shape == (3, 25)
    assert np.array_equal(out.values, np.full((3, 25), 2.5, dtype=np.float32))


def test_ramp_closed_form():
    x = np.arange(50, dtype=np.float32).reshape(1, 50)
    out = resample_temporal(seq_of(x), [(0, 0), (49, 24)], t_out=25)
    expected = np.array([49.0 * j / 24.0 for j in range(25)], dtype=np.float32)
    np.testing.assert_allclose(out.values[0], expected, rtol=1e-6, atol=1e-5)
    brute = brute_force_resample(x, [(0, 0), (49, 24)], 25)
    np.testing.assert_allclose(out.values, brute, rtol=1e-6, atol=1e-6)


def test_multi_anchor_matches_brute_force():
    rng = np.random.default_rng(7)
    x = rng.normal(size=(5, 40)).astype(np.float32)
    anchors = [(0, 0), (9, 4), (22, 16), (39, 24)]
    out = resample_temporal(seq_of(x), anchors, t_out=25)
    brute = brute_force_resample(x, anchors, 25)
    np.testing.assert_allclose(out.values, brute, rtol=0, atol=1e-6)


def test_endpoints_exact():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(4, 17)).astype(np.float32)
    out = resample_temporal(seq_of(x), t_out=25)
    assert np.array_equal(out.values[:, 0], x[:, 0])
    assert np.array_equal(out.values[:, -1], x[:, -1])


def test_commutes_with_row_permutation():
    rng = np.random.default_rng(9)
    x = rng.normal(size=(6, 31)).astype(np.float32)
    perm = rng.permutation(6)
    direct = resample_temporal(seq_of(x[perm]), t_out=25).values
    swapped = resample_temporal(seq_of(x), t_out=25).values[perm]
    assert np.array_equal(direct, swapped)


def test_non_monotone_anchors_rejected():
    x = np.zeros((2, 10), dtype=np.float32)
    with pytest.raises(InputValidationError, match="strictly increasing"):
        resample_temporal(seq_of(x), [(0, 0), (5, 6), (4, 12), (9, 24)], t_out=25)
    with pytest.raises(InputValidationError, match="anchors"):
        resample_temporal(seq_of(x), [(0, 0), (9, 20)], t_out=25)


def test_t_out_too_small():
    x = np.zeros((2, 10), dtype=np.float32)
    with pytest.raises(InputValidationError, match="t_out"):
        resample_temporal(seq_of(x), t_out=1)
