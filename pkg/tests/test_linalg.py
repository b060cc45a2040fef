"""Core linear algebra: moments, decompositions, AR(1), Gaussian sampling."""

import numpy as np
import pytest

from hdmean import (
    ar1_covariance,
    as_data_matrix,
    sample_moments,
    sample_mvn,
    spawn_rng,
    spectral_decompose,
)


class TestSampleMoments:
    def test_univariate_column(self):
        mean, cov = sample_moments(np.array([[1.0], [2.0], [3.0]]))
        assert mean == pytest.approx([2.0])
        assert np.allclose(cov, [[1.0]])  # divisor n-1

    def test_identical_rows_give_zero_covariance(self):
        X = np.tile([3.0, -1.0, 2.0], (7, 1))
        _, cov = sample_moments(X)
        assert np.all(cov == 0.0)

    def test_two_row_hand_computation(self):
        mean, cov = sample_moments(np.array([[1.0, 0.0], [0.0, 1.0]]))
        assert mean == pytest.approx([0.5, 0.5])
        assert np.allclose(cov, [[0.5, -0.5], [-0.5, 0.5]])

    def test_rejects_single_row(self):
        with pytest.raises(ValueError, match="at least 2"):
            sample_moments(np.array([[1.0, 2.0]]))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError, match="non-finite"):
            sample_moments(np.array([[1.0], [np.nan]]))

    def test_covariance_is_psd(self):
        rng = np.random.default_rng(7)
        for n, p in [(5, 8), (50, 10), (20, 20)]:
            _, cov = sample_moments(rng.standard_normal((n, p)))
            lam = np.linalg.eigvalsh(cov)
            assert lam.min() >= -1e-8 * max(abs(lam).max(), 1.0)
            assert np.allclose(cov, cov.T)


class TestSpectralDecompose:
    def test_identity(self):
        dec = spectral_decompose(np.eye(4))
        assert dec.eigenvalues == pytest.approx(np.ones(4))
        assert dec.eigenvectors.T @ dec.eigenvectors == pytest.approx(np.eye(4))

    def test_diagonal_ascending(self):
        dec = spectral_decompose(np.diag([4.0, 1.0]))
        assert dec.eigenvalues == pytest.approx([1.0, 4.0])
        assert abs(dec.eigenvectors[1, 0]) == pytest.approx(1.0)
        assert abs(dec.eigenvectors[0, 1]) == pytest.approx(1.0)

    def test_two_by_two_hand_computation(self):
        dec = spectral_decompose(np.array([[2.0, 1.0], [1.0, 2.0]]))
        assert dec.eigenvalues == pytest.approx([1.0, 3.0])
        s = 1.0 / np.sqrt(2.0)
        # sign convention: first nonzero component nonnegative
        assert dec.eigenvectors[:, 0] == pytest.approx([s, -s])
        assert dec.eigenvectors[:, 1] == pytest.approx([s, s])

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError, match="not symmetric"):
            spectral_decompose(np.array([[1.0, 2.0], [0.0, 1.0]]))

    @pytest.mark.parametrize("p", [3, 17, 64, 200])
    def test_reconstruction(self, p):
        rng = np.random.default_rng(p)
        A = rng.standard_normal((p, p))
        M = A + A.T
        dec = spectral_decompose(M)
        rel = np.linalg.norm(dec.reconstruct() - M) / np.linalg.norm(M)
        assert rel <= 1e-8

    def test_sign_convention_reproducible(self):
        rng = np.random.default_rng(3)
        A = rng.standard_normal((6, 6))
        M = A @ A.T
        U1 = spectral_decompose(M).eigenvectors
        U2 = spectral_decompose(M.copy()).eigenvectors
        assert np.array_equal(U1, U2)
        for j in range(6):
            nz = np.flatnonzero(np.abs(U1[:, j]) > 1e-14)
            assert U1[nz[0], j] > 0


class TestAr1Covariance:
    def test_zero_rho_is_identity(self):
        assert np.array_equal(ar1_covariance(0.0, 5), np.eye(5))

    def test_half_rho_two_by_two(self):
        assert np.allclose(ar1_covariance(0.5, 2), [[1.0, 0.5], [0.5, 1.0]])

    def test_corner_entry(self):
        assert ar1_covariance(0.8, 3)[0, 2] == pytest.approx(0.64)

    @pytest.mark.parametrize("rho", [1.0, -1.0, 1.5])
    def test_rejects_unit_rho(self, rho):
        with pytest.raises(ValueError):
            ar1_covariance(rho, 3)

    @pytest.mark.parametrize("rho,p", [(0.95, 200), (-0.95, 200), (0.5, 50)])
    def test_positive_definite(self, rho, p):
        lam = np.linalg.eigvalsh(ar1_covariance(rho, p))
        assert lam.min() > 0


class TestSampleMvn:
    def test_shape_and_finiteness(self):
        X = sample_mvn(np.zeros(2), np.eye(2), 5, seed=0)
        assert X.shape == (5, 2)
        assert np.all(np.isfinite(X))

    def test_seed_determinism_is_bitwise(self):
        a = sample_mvn(np.zeros(3), ar1_covariance(0.3, 3), 50, seed=42)
        b = sample_mvn(np.zeros(3), ar1_covariance(0.3, 3), 50, seed=42)
        assert np.array_equal(a, b)

    def test_marginal_variance(self):
        X = sample_mvn([0.0], [[4.0]], 10_000, seed=11)
        assert 3.5 <= X.var(ddof=1) <= 4.5

    def test_rejects_non_positive_definite(self):
        with pytest.raises(np.linalg.LinAlgError):
            sample_mvn(np.zeros(2), [[1.0, 2.0], [2.0, 1.0]], 3, seed=0)

    @pytest.mark.parametrize("rho,p", [(0.6, 4), (-0.4, 5)])
    def test_empirical_covariance_matches_ar1(self, rho, p):
        Sigma = ar1_covariance(rho, p)
        X = sample_mvn(np.zeros(p), Sigma, 100_000, seed=5)
        _, S = sample_moments(X)
        assert np.abs(S - Sigma).max() <= 0.05


class TestRngStreams:
    def test_spawned_streams_are_deterministic_and_distinct(self):
        a = spawn_rng(9, 1, 2).standard_normal(4)
        b = spawn_rng(9, 1, 2).standard_normal(4)
        c = spawn_rng(9, 1, 3).standard_normal(4)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)


def test_as_data_matrix_promotes_vector():
    X = as_data_matrix([1.0, 2.0, 3.0])
    assert X.shape == (3, 1)
