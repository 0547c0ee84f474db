import numpy as np
import pytest

from pcovmap.kernels import KernelMatrix, KernelSpec, center_kernel, compute_kernel


class TestComputeKernel:
    def test_rbf_self_similarity(self):
        x = np.array([[1.0, 2.0, 3.0]])
        K = compute_kernel(x, x, KernelSpec("rbf", gamma=0.5))
        assert K.values[0, 0] == pytest.approx(1.0, abs=1e-15)

    def test_linear_orthogonal(self):
        A = np.array([[1.0, 0.0]])
        B = np.array([[0.0, 1.0]])
        K = compute_kernel(A, B, KernelSpec("linear"))
        assert K.values[0, 0] == pytest.approx(0.0, abs=1e-15)

    def test_rbf_gamma_001_closed_form(self):
        # gamma 0.01 at squared distance 100 -> exp(-1)
        a = np.zeros((1, 1))
        b = np.array([[10.0]])
        K = compute_kernel(a, b, KernelSpec("rbf", gamma=0.01))
        assert K.values[0, 0] == pytest.approx(np.exp(-1.0), abs=1e-12)

    def test_rbf_range_and_diagonal(self):
        rng = np.random.default_rng(0)
        X = rng.standard_normal((15, 3))
        K = compute_kernel(X, X, KernelSpec("rbf", gamma=0.7)).values
        assert np.all(K > 0) and np.all(K <= 1.0)
        assert np.array_equal(np.diag(K), np.ones(15))

    def test_polynomial(self):
        a = np.array([[1.0, 1.0]])
        b = np.array([[2.0, 0.0]])
        K = compute_kernel(a, b, KernelSpec("polynomial", gamma=0.5,
                                            degree=2, coef0=1.0))
        assert K.values[0, 0] == pytest.approx((0.5 * 2 + 1.0) ** 2)

    def test_default_gamma_is_inverse_nfeatures(self):
        X = np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]])
        K = compute_kernel(X, X, KernelSpec("rbf")).values
        assert K[0, 1] == pytest.approx(np.exp(-2.0 / 4.0))

    def test_feature_mismatch(self):
        with pytest.raises(ValueError):
            compute_kernel(np.zeros((2, 3)), np.zeros((2, 4)))

    def test_invalid_spec(self):
        with pytest.raises(ValueError):
            KernelSpec("rbf", gamma=-1.0)
        with pytest.raises(ValueError):
            KernelSpec("sigmoid")


class TestCenterKernel:
    def test_closed_form_2x2(self):
        K = center_kernel(KernelMatrix(values=np.eye(2)))
        assert np.allclose(K.values, [[0.5, -0.5], [-0.5, 0.5]])

    def test_idempotent(self):
        rng = np.random.default_rng(1)
        M = rng.standard_normal((6, 3))
        K = center_kernel(compute_kernel(M, M))
        K2 = center_kernel(KernelMatrix(values=K.values))
        assert np.max(np.abs(K2.values - K.values)) < 1e-12

    def test_centered_row_sums(self):
        rng = np.random.default_rng(2)
        M = rng.standard_normal((6, 4))
        K = center_kernel(compute_kernel(M, M, KernelSpec("rbf", gamma=0.3)))
        assert np.max(np.abs(K.values.sum(axis=0))) < 1e-10
        assert np.max(np.abs(K.values.sum(axis=1))) < 1e-10

    def test_out_of_sample_matches_explicit_feature_centering(self):
        # centering the linear kernel with training stats must equal the
        # kernel of explicitly train-centered features
        rng = np.random.default_rng(3)
        Xtr = rng.standard_normal((10, 3))
        Xte = rng.standard_normal((4, 3))
        mu = Xtr.mean(axis=0)
        Ktr = center_kernel(compute_kernel(Xtr, Xtr))
        Kte = center_kernel(compute_kernel(Xte, Xtr), training_stats=Ktr)
        ref = (Xte - mu) @ (Xtr - mu).T
        assert np.max(np.abs(Kte.values - ref)) < 1e-10

    def test_rectangular_without_stats_rejected(self):
        with pytest.raises(ValueError):
            center_kernel(KernelMatrix(values=np.ones((2, 5))))
