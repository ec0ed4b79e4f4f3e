import numpy as np
import pytest

from vecrad import (
    DataSample,
    empirical_covariance,
    largest_eigenvalue,
    spectral_norm,
    subset_covariance,
    summarize_spectrum,
)

from conftest import unit_sample


def jacobi_eigenvalues(a, sweeps=100, tol=1e-13):
    """Independent dense eigensolver oracle: cyclic two-sided Jacobi rotations."""
    a = np.array(a, dtype=float)
    d = a.shape[0]
    for _ in range(sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off < tol:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                if abs(a[p, q]) < 1e-300:
                    continue
                theta = 0.5 * (a[q, q] - a[p, p]) / a[p, q]
                t = 1.0 if theta == 0 else np.sign(theta) / (abs(theta) + np.sqrt(theta**2 + 1.0))
                c = 1.0 / np.sqrt(t**2 + 1.0)
                s = t * c
                rot = np.eye(d)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
    return np.sort(np.diag(a))


class TestDataSample:
    def test_empty_sample_rejected(self):
        with pytest.raises(ValueError, match="empty sample"):
            DataSample(np.zeros((0, 3)))

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError, match="finite"):
            DataSample(np.array([[1.0, np.nan]]))

    def test_vectors_read_only(self):
        s = DataSample(np.eye(2))
        with pytest.raises(ValueError):
            s.vectors[0, 0] = 5.0


class TestCovariance:
    def test_orthonormal_pair(self):
        s = DataSample(np.eye(2))
        np.testing.assert_allclose(empirical_covariance(s), np.diag([0.5, 0.5]))

    def test_rank_one(self):
        s = DataSample(np.array([[1.0, 0.0]]))
        np.testing.assert_allclose(empirical_covariance(s), [[1.0, 0.0], [0.0, 0.0]])

    def test_unit_rows_trace(self, rng):
        s = unit_sample(rng, 5, 3)
        # oracle: trace must equal the direct mean of squared row norms
        direct = float(np.mean(np.sum(s.vectors**2, axis=1)))
        assert abs(np.trace(empirical_covariance(s)) - direct) <= 1e-12
        assert abs(direct - 1.0) <= 1e-12

    def test_psd(self, rng):
        for _ in range(20):
            s = DataSample(rng.standard_normal((6, 4)) * 3)
            evs = np.linalg.eigvalsh(empirical_covariance(s))
            assert evs.min() >= -1e-9

    def test_trace_identity(self, rng):
        for _ in range(10):
            s = DataSample(rng.standard_normal((7, 5)))
            c = empirical_covariance(s)
            expect = np.sum(s.vectors**2) / s.N
            assert abs(np.trace(c) - expect) <= 1e-12 * max(1.0, expect)


class TestSubsetCovariance:
    def test_full_set_matches(self, rng):
        s = DataSample(rng.standard_normal((6, 3)))
        np.testing.assert_allclose(
            subset_covariance(s, range(6)), empirical_covariance(s), atol=1e-15
        )

    def test_singleton(self):
        s = DataSample(np.eye(2))
        np.testing.assert_allclose(subset_covariance(s, [0]), [[1.0, 0.0], [0.0, 0.0]])

    def test_orthonormal_subset(self):
        s = DataSample(np.eye(2))
        np.testing.assert_allclose(subset_covariance(s, [0, 1]), np.diag([0.5, 0.5]))

    def test_errors(self):
        s = DataSample(np.eye(2))
        with pytest.raises(ValueError, match="empty subset"):
            subset_covariance(s, [])
        with pytest.raises(ValueError, match="out of range"):
            subset_covariance(s, [0, 2])


class TestLargestEigenvalue:
    def test_diagonal(self):
        assert largest_eigenvalue(np.diag([0.5, 0.5])) == pytest.approx(0.5, rel=1e-12)

    def test_closed_form_2x2(self):
        # eigenvalues of [[2,1],[1,2]] are 1 and 3
        assert largest_eigenvalue(np.array([[2.0, 1.0], [1.0, 2.0]])) == pytest.approx(3.0, rel=1e-10)

    def test_matches_jacobi_oracle(self, rng):
        for _ in range(10):
            m = rng.standard_normal((6, 6))
            a = m @ m.T
            expect = jacobi_eigenvalues(a)[-1]
            assert largest_eigenvalue(a, rel_tol=1e-9) == pytest.approx(expect, rel=1e-6)

    def test_zero_matrix(self):
        assert largest_eigenvalue(np.zeros((3, 3))) == 0.0

    def test_asymmetric_rejected(self):
        with pytest.raises(ValueError, match="not symmetric"):
            largest_eigenvalue(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_below_trace(self, rng):
        for _ in range(10):
            s = DataSample(rng.standard_normal((5, 4)))
            c = empirical_covariance(s)
            assert largest_eigenvalue(c) <= np.trace(c) + 1e-9


class TestSpectralNorm:
    def test_single_row(self, rng):
        v = rng.standard_normal(5)
        assert spectral_norm(v[None, :]) == pytest.approx(np.linalg.norm(v), rel=1e-9)

    def test_identity(self):
        assert spectral_norm(np.eye(3)) == pytest.approx(1.0, rel=1e-12)

    def test_diagonal(self):
        assert spectral_norm(np.array([[1.0, 0.0], [0.0, 2.0]])) == pytest.approx(2.0, rel=1e-10)

    def test_squares_to_gram_eigenvalue(self, rng):
        for _ in range(10):
            d = rng.standard_normal((4, 7))
            s = spectral_norm(d)
            lam = largest_eigenvalue(d.T @ d)
            assert abs(s * s - lam) <= 1e-9 * max(lam, 1.0)

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError, match="finite"):
            spectral_norm(np.array([[np.inf, 0.0]]))


def test_summary_invariants(rng):
    s = unit_sample(rng, 8, 3)
    summary = summarize_spectrum(s)
    assert 0.0 <= summary.lambda_max <= summary.trace
    assert summary.trace == pytest.approx(1.0, abs=1e-9)
    assert summary.dim == 3
