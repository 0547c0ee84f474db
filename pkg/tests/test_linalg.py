import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcovmap.linalg import (
    center_and_scale,
    apply_recipe,
    invert_recipe,
    eigh_descending,
    pearson_correlation,
    psd_power,
)

from oracles import power_iteration_eigh


class TestEighDescending:
    def test_identity(self):
        eig = eigh_descending(np.eye(2))
        assert np.allclose(eig.eigenvalues, [1.0, 1.0])
        assert np.allclose(eig.eigenvectors.T @ eig.eigenvectors, np.eye(2))

    def test_classic_pair(self):
        eig = eigh_descending(np.array([[2.0, 1.0], [1.0, 2.0]]))
        assert np.allclose(eig.eigenvalues, [3.0, 1.0])
        v0 = eig.eigenvectors[:, 0]
        v1 = eig.eigenvectors[:, 1]
        assert np.allclose(np.abs(v0), [1, 1] / np.sqrt(2))
        assert np.allclose(np.abs(v1), [1, 1] / np.sqrt(2))
        assert abs(v0 @ v1) < 1e-12

    def test_matches_power_iteration_oracle(self):
        rng = np.random.default_rng(42)
        M = rng.standard_normal((8, 8))
        A = 0.5 * (M + M.T)
        eig = eigh_descending(A)
        evals, evecs = power_iteration_eigh(A)
        assert np.max(np.abs(eig.eigenvalues - evals)) < 1e-10
        # eigenpair residuals rather than vector comparison (sign/degeneracy)
        for i in range(8):
            r = A @ eig.eigenvectors[:, i] - eig.eigenvalues[i] * eig.eigenvectors[:, i]
            assert np.linalg.norm(r) < 1e-9 * np.linalg.norm(A)

    def test_reconstruction_and_orthonormality(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            M = rng.standard_normal((6, 6))
            A = 0.5 * (M + M.T)
            eig = eigh_descending(A)
            U, lam = eig.eigenvectors, eig.eigenvalues
            assert np.all(np.diff(lam) <= 1e-12)
            recon = (U * lam) @ U.T
            assert np.linalg.norm(recon - A) < 1e-8 * np.linalg.norm(A)
            assert np.max(np.abs(U.T @ U - np.eye(6))) < 1e-9

    def test_sign_convention(self):
        rng = np.random.default_rng(3)
        M = rng.standard_normal((5, 5))
        eig = eigh_descending(0.5 * (M + M.T))
        for j in range(5):
            col = eig.eigenvectors[:, j]
            assert col[np.argmax(np.abs(col))] > 0

    def test_rejects_nonsquare(self):
        with pytest.raises(ValueError):
            eigh_descending(np.ones((2, 3)))

    def test_rejects_nonfinite(self):
        A = np.eye(3)
        A[0, 0] = np.nan
        with pytest.raises(ValueError):
            eigh_descending(A)

    def test_rejects_asymmetric(self):
        A = np.array([[1.0, 2.0], [0.0, 1.0]])
        with pytest.raises(ValueError):
            eigh_descending(A)


class TestPsdPower:
    def test_identity_inverse_sqrt(self):
        assert np.allclose(psd_power(np.eye(4), -0.5), np.eye(4))

    def test_diagonal_sqrt(self):
        assert np.allclose(psd_power(np.diag([4.0, 9.0]), 0.5),
                           np.diag([2.0, 3.0]))

    def test_pseudoinverse_identity(self):
        rng = np.random.default_rng(11)
        M = rng.standard_normal((6, 6))
        A = M @ M.T
        R = psd_power(A, -0.5)  # R @ R is the pseudoinverse of A
        assert np.max(np.abs(A @ R @ R @ A - A)) < 1e-8 * np.max(np.abs(A))

    def test_sqrt_squared_reproduces(self):
        rng = np.random.default_rng(12)
        M = rng.standard_normal((6, 4))
        A = M @ M.T  # rank 4 PSD
        H = psd_power(A, 0.5)
        assert np.max(np.abs(H @ H - A)) < 1e-8 * max(np.max(np.abs(A)), 1)

    def test_zero_matrix_negative_power_rejected(self):
        with pytest.raises(ValueError):
            psd_power(np.zeros((3, 3)), -0.5)

    def test_non_psd_rejected(self):
        with pytest.raises(ValueError):
            psd_power(np.diag([1.0, -1.0]), 0.5)


class TestCenterAndScale:
    def test_two_point(self):
        Xc, recipe = center_and_scale(np.array([[1.0], [3.0]]))
        assert np.allclose(Xc, [[-1.0], [1.0]])
        assert np.allclose(recipe.column_means, [2.0])

    def test_constant_column(self):
        X = np.array([[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]])
        Xc, recipe = center_and_scale(X, standardize=True)
        assert np.allclose(Xc[:, 1], 0.0)
        assert recipe.column_scales[1] == 1.0

    def test_postconditions_random(self):
        rng = np.random.default_rng(5)
        X = rng.standard_normal((5, 3)) * 3 + 1
        Xc, recipe = center_and_scale(X, standardize=True)
        assert np.max(np.abs(Xc.mean(axis=0))) < 1e-12
        assert np.max(np.abs(Xc.var(axis=0) - 1.0)) < 1e-12

    def test_roundtrip(self):
        rng = np.random.default_rng(6)
        X = rng.standard_normal((8, 4)) * 10
        Xc, recipe = center_and_scale(X, standardize=True)
        back = invert_recipe(apply_recipe(X, recipe), recipe)
        assert np.max(np.abs(back - X)) < 1e-10 * np.max(np.abs(X))

    def test_idempotent_on_centered(self):
        rng = np.random.default_rng(8)
        X = rng.standard_normal((10, 3))
        Xc, _ = center_and_scale(X)
        Xcc, recipe2 = center_and_scale(Xc)
        assert np.max(np.abs(recipe2.column_means)) < 1e-12
        assert np.allclose(Xcc, Xc)

    def test_rejects_single_row(self):
        with pytest.raises(ValueError):
            center_and_scale(np.array([[1.0, 2.0]]))


class TestPearson:
    def test_exact_linear(self):
        assert pearson_correlation([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0, abs=1e-12)

    def test_exact_anticorrelation(self):
        assert pearson_correlation([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0, abs=1e-12)

    def test_hand_computed(self):
        assert pearson_correlation([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8, abs=1e-12)

    def test_constant_undefined(self):
        assert np.isnan(pearson_correlation([1, 1, 1], [1, 2, 3]))

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=30),
           st.integers(0, 2**31 - 1))
    def test_bounded(self, a, seed):
        rng = np.random.default_rng(seed)
        b = rng.standard_normal(len(a))
        r = pearson_correlation(a, b)
        assert np.isnan(r) or -1.0 <= r <= 1.0
