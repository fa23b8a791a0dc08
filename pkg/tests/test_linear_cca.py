import numpy as np
import pytest
import scipy.linalg

from mmcrt.errors import InputValidationError, NumericalError
from mmcrt.cca import CcaConfig, cca_gradient, cca_objective, linear_cca


def test_self_correlation_all_ones():
    rng = np.random.default_rng(0)
    h = rng.normal(size=(1000, 5))
    _, _, rho, _ = linear_cca(h, h.copy(), k=5, r=1e-6)
    assert np.all(rho > 1 - 1e-3)


def test_independent_views_low_correlation():
    rng = np.random.default_rng(1)
    h1 = rng.normal(size=(5000, 5))
    h2 = rng.normal(size=(5000, 5))
    _, _, rho, _ = linear_cca(h1, h2, k=5, r=1e-6)
    assert np.all(rho < 0.1)


def test_shared_latent_population_value():
    # x = z + e1, y = z + e2 with var(z) = 1, var(e) = sigma^2:
    # population canonical correlation = 1 / (1 + sigma^2)
    rng = np.random.default_rng(2)
    n, d, sigma2 = 20000, 5, 1.0
    z = rng.normal(size=(n, d))
    h1 = z + np.sqrt(sigma2) * rng.normal(size=(n, d))
    h2 = z + np.sqrt(sigma2) * rng.normal(size=(n, d))
    _, _, rho, _ = linear_cca(h1, h2, k=d, r=1e-6)
    assert abs(rho[0] - 0.5) < 0.02


def test_recovery_within_sampling_error():
    # estimated correlations approach the population value at the 2/sqrt(n) scale
    rng = np.random.default_rng(3)
    for n in (2000, 8000):
        z = rng.normal(size=(n, 3))
        h1 = z + rng.normal(size=(n, 3))
        h2 = z + rng.normal(size=(n, 3))
        _, _, rho, _ = linear_cca(h1, h2, k=3, r=1e-6)
        assert np.all(np.abs(rho - 0.5) < 2 / np.sqrt(n) + 0.02)


def test_whitening_property():
    rng = np.random.default_rng(4)
    h1 = rng.normal(size=(200, 6)) @ rng.normal(size=(6, 6))
    h2 = rng.normal(size=(200, 4))
    r = 1e-3
    a1, a2, rho, (m1, m2) = linear_cca(h1, h2, k=3, r=r)
    s11 = np.cov(h1.T) + r * np.eye(6)
    s22 = np.cov(h2.T) + r * np.eye(4)
    np.testing.assert_allclose(a1.T @ s11 @ a1, np.eye(3), atol=1e-5)
    np.testing.assert_allclose(a2.T @ s22 @ a2, np.eye(3), atol=1e-5)


def test_degenerate_covariance_signalled():
    h1 = np.ones((10, 3))  # zero variance
    h2 = np.random.default_rng(5).normal(size=(10, 3))
    with pytest.raises(NumericalError, match="degenerate"):
        linear_cca(h1, h2, k=2, r=0.0)


def test_k_too_large_rejected():
    rng = np.random.default_rng(6)
    with pytest.raises(InputValidationError, match="exceeds"):
        linear_cca(rng.normal(size=(10, 3)), rng.normal(size=(10, 4)), k=4)


def scipy_reference_objective(h1, h2, k, r):
    """Independent route: explicit covariance blocks, scipy sqrtm/inv, svdvals."""
    n = h1.shape[0]
    h1b = h1 - h1.mean(0)
    h2b = h2 - h2.mean(0)
    s11 = h1b.T @ h1b / (n - 1) + r * np.eye(h1.shape[1])
    s22 = h2b.T @ h2b / (n - 1) + r * np.eye(h2.shape[1])
    s12 = h1b.T @ h2b / (n - 1)
    t = np.real(scipy.linalg.inv(scipy.linalg.sqrtm(s11))) @ s12 @ \
        np.real(scipy.linalg.inv(scipy.linalg.sqrtm(s22)))
    return float(np.sum(np.sort(scipy.linalg.svdvals(t))[::-1][:k]))


def test_objective_small_instance_matches_reference():
    rng = np.random.default_rng(7)
    h1 = rng.normal(size=(8, 3))
    h2 = rng.normal(size=(8, 3))
    cfg = CcaConfig(k=2, r=1e-3)
    ours = cca_objective(h1, h2, cfg)
    ref = scipy_reference_objective(h1, h2, 2, 1e-3)
    assert abs(ours - ref) < 1e-8


def test_objective_self_view_approaches_k():
    rng = np.random.default_rng(8)
    h = rng.normal(size=(2000, 5))
    cfg = CcaConfig(k=5, r=1e-6)
    assert abs(cca_objective(h, h.copy(), cfg) - 5.0) < 1e-3


def test_objective_swap_symmetric_exactly():
    rng = np.random.default_rng(9)
    h1 = rng.normal(size=(20, 4))
    h2 = rng.normal(size=(20, 6))
    cfg = CcaConfig(k=3, r=1e-3)
    assert cca_objective(h1, h2, cfg) == cca_objective(h2, h1, cfg)


def test_objective_joint_permutation_invariant():
    rng = np.random.default_rng(10)
    h1 = rng.normal(size=(30, 4))
    h2 = rng.normal(size=(30, 4))
    perm = rng.permutation(30)
    cfg = CcaConfig(k=4, r=1e-3)
    assert abs(cca_objective(h1, h2, cfg) - cca_objective(h1[perm], h2[perm], cfg)) < 1e-8


def test_objective_bounds():
    rng = np.random.default_rng(11)
    for _ in range(5):
        h1 = rng.normal(size=(12, 5))
        h2 = rng.normal(size=(12, 5))
        cfg = CcaConfig(k=5, r=1e-3)
        obj = cca_objective(h1, h2, cfg)
        assert -1e-8 <= obj <= 5 + 1e-8


def test_gradient_swap_symmetry_exact():
    rng = np.random.default_rng(12)
    h1 = rng.normal(size=(15, 4))
    h2 = rng.normal(size=(15, 4))
    cfg = CcaConfig(k=3, r=1e-3)
    g1, g2 = cca_gradient(h1, h2, cfg)
    g2s, g1s = cca_gradient(h2, h1, cfg)
    assert np.array_equal(g1, g1s)
    assert np.array_equal(g2, g2s)


def fd_gradient(h1, h2, cfg, h=1e-5):
    g1 = np.zeros_like(h1)
    g2 = np.zeros_like(h2)
    for mat, grad in ((h1, g1), (h2, g2)):
        flat = mat.reshape(-1)
        gflat = grad.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            up = cca_objective(h1, h2, cfg)
            flat[i] = orig - h
            down = cca_objective(h1, h2, cfg)
            flat[i] = orig
            gflat[i] = (up - down) / (2 * h)
    return g1, g2


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(13)
    h1 = rng.normal(size=(10, 4))
    h2 = rng.normal(size=(10, 4))
    cfg = CcaConfig(k=3, r=1e-3)
    g1, g2 = cca_gradient(h1, h2, cfg)
    f1, f2 = fd_gradient(h1, h2, cfg)
    for a, f in ((g1, f1), (g2, f2)):
        rel = np.abs(a - f) / np.maximum.reduce([np.abs(a), np.abs(f), np.full_like(a, 1e-8)])
        assert rel.max() < 1e-4


def test_gradient_centering_invariance():
    rng = np.random.default_rng(14)
    h1 = rng.normal(size=(12, 3))
    h2 = rng.normal(size=(12, 3))
    cfg = CcaConfig(k=2, r=1e-3)
    g1, g2 = cca_gradient(h1, h2, cfg)
    offset = rng.normal(size=(1, 3))
    g1o, g2o = cca_gradient(h1 + offset, h2, cfg)
    np.testing.assert_allclose(g1, g1o, atol=1e-8)
    np.testing.assert_allclose(g2, g2o, atol=1e-8)
    obj = cca_objective(h1, h2, cfg)
    obj_off = cca_objective(h1 + offset, h2, cfg)
    assert abs(obj - obj_off) < 1e-8
