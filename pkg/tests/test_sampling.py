import numpy as np
import pytest

from wishart_lab import (ConfigError, McConfig, ModelParams, contour_integral_I,
                         haar_orthogonal, haar_orthogonal_integral, haar_unitary,
                         loe_direct_cdf, make_contour, sample_wishart_all_eigs,
                         sample_wishart_max_eig, sphere_integral_oracle)


class TestWishartSampler:
    def test_trace_mean(self):
        # E[sum of eigenvalues] = E[tr S] = N (1 + tau / N); chi-square sanity
        p = ModelParams(2, 4, 0.0)
        eigs = sample_wishart_all_eigs(McConfig(123, 40_000, p))
        tr = eigs.sum(axis=1)
        se = tr.std(ddof=1) / np.sqrt(tr.size)
        assert abs(tr.mean() - p.N) < 3 * se

    def test_spike_raises_trace(self):
        p = ModelParams(2, 4, 1.0)
        eigs = sample_wishart_all_eigs(McConfig(123, 40_000, p))
        tr = eigs.sum(axis=1)
        se = tr.std(ddof=1) / np.sqrt(tr.size)
        assert abs(tr.mean() - (p.N + p.tau)) < 3 * se

    def test_deterministic_stream(self):
        p = ModelParams(2, 4, 1.0)
        a = sample_wishart_max_eig(McConfig(7, 1000, p))
        b = sample_wishart_max_eig(McConfig(7, 1000, p))
        assert np.array_equal(a, b)
        c = sample_wishart_max_eig(McConfig(8, 1000, p))
        assert not np.array_equal(a, c)

    def test_empirical_cdf_matches_exact_null(self):
        # finite-N oracle: the direct Pfaffian CDF at tau = 0 (no asymptotics)
        p = ModelParams(4, 8, 0.0)
        lams = sample_wishart_max_eig(McConfig(99, 50_000, p))
        for z in (1.5, 2.2, 3.0):
            th = loe_direct_cdf(p, z)
            emp = float(np.mean(lams < z))
            se = np.sqrt(th * (1 - th) / lams.size)
            assert abs(th - emp) < 3 * se

    def test_validation(self):
        with pytest.raises(ConfigError):
            McConfig(0, 0, ModelParams(2, 4, 0.0))


class TestHaarSamplers:
    def test_orthogonality_and_column_moments(self):
        rng = np.random.default_rng(2)
        n = 4
        g = haar_orthogonal(rng, n, 20_000)
        eye_dev = np.einsum("kij,klj->kil", g, g) - np.eye(n)
        assert np.max(np.abs(eye_dev)) < 1e-12
        col2 = g[:, :, -1] ** 2
        se = col2.std(ddof=1) / np.sqrt(col2.shape[0])
        assert np.all(np.abs(col2.mean(axis=0) - 1.0 / n) < 3 * se.max())

    def test_unitary(self):
        rng = np.random.default_rng(3)
        n = 3
        g = haar_unitary(rng, n, 5_000)
        eye_dev = np.einsum("kij,klj->kil", g, g.conj()) - np.eye(n)
        assert np.max(np.abs(eye_dev)) < 1e-12
        col2 = np.abs(g[:, :, -1]) ** 2
        se = col2.std(ddof=1) / np.sqrt(col2.shape[0])
        assert np.all(np.abs(col2.mean(axis=0) - 1.0 / n) < 3 * se.max())


class TestSphereOracle:
    def test_tau_zero_is_prefactor_exactly(self):
        p = ModelParams(4, 8, 0.0)
        lam = [0.5, 1.0, 1.5, 3.0]
        mean, se = sphere_integral_oracle(McConfig(1, 100, p), lam)
        assert se == 0.0
        assert mean == pytest.approx(np.exp(-0.5 * p.M * sum(lam)), rel=1e-12)

    def test_equal_eigenvalues_have_zero_variance(self):
        p = ModelParams(4, 8, 1.0)
        lam = [1.2] * 4
        mean, se = sphere_integral_oracle(McConfig(1, 500, p), lam)
        assert se < 1e-12 * mean
        expect = np.exp(-0.5 * p.M * 4 * 1.2) * np.exp(p.M * p.tau_tilde * 1.2)
        assert mean == pytest.approx(expect, rel=1e-12)

    def test_ratio_against_contour(self):
        p = ModelParams(4, 8, 1.0)
        l1 = [0.5, 1.0, 1.5, 3.0]
        l2 = [0.3, 0.8, 2.0, 2.5]
        contour = make_contour(3.0 * p.tau_tilde + 0.3, node_count=64, margin=0.4)
        r_ct = contour_integral_I(p, l1, contour) / contour_integral_I(p, l2, contour)
        m1, s1 = sphere_integral_oracle(McConfig(11, 100_000, p), l1)
        m2, s2 = sphere_integral_oracle(McConfig(12, 100_000, p), l2)
        r_mc = m1 / m2
        se = abs(r_mc) * np.sqrt((s1 / m1) ** 2 + (s2 / m2) ** 2)
        assert abs(r_ct.real - r_mc) < 3 * se
        assert abs(r_ct.imag) < 1e-12


class TestContourIntegralI:
    def test_equal_lambda_residue(self):
        # N = 2 coincident eigenvalues: integrand e^{Mt}/(t - tt a), a simple pole
        p = ModelParams(2, 4, 1.0)
        a = 1.3
        contour = make_contour(2.0 * p.tau_tilde * a, node_count=64, margin=0.4)
        val = contour_integral_I(p, [a, a], contour)
        expect = np.exp(-0.5 * p.M * 2 * a) * np.exp(p.M * p.tau_tilde * a)
        assert val == pytest.approx(expect, rel=1e-8)

    def test_radius_invariance(self):
        p = ModelParams(4, 8, 1.0)
        lam = [0.5, 1.0, 1.5, 3.0]
        c1 = make_contour(3.0 * p.tau_tilde + 0.3, node_count=96, margin=0.4)
        c2 = make_contour(3.0 * p.tau_tilde + 0.3, node_count=96, margin=1.1)
        v1 = contour_integral_I(p, lam, c1)
        v2 = contour_integral_I(p, lam, c2)
        assert v1 == pytest.approx(v2, rel=1e-8)

    def test_enclosure_check(self):
        p = ModelParams(4, 8, 1.0)
        contour = make_contour(0.1, node_count=16, margin=0.01)
        with pytest.raises(ConfigError):
            contour_integral_I(p, [10.0, 11.0, 12.0, 13.0], contour)


class TestHaarIntegral:
    def test_y_zero_is_one(self):
        p = ModelParams(2, 4, 0.0)
        mean, se = haar_orthogonal_integral(McConfig(4, 200, p), [0.2, 0.5], 0.0)
        assert mean == 1.0 and se == 0.0

    def test_identity_argument_is_constant(self):
        p = ModelParams(2, 4, 0.0)
        c = 0.7
        mean, se = haar_orthogonal_integral(McConfig(4, 500, p), [c, c, c], 0.3, M=2)
        assert se < 1e-12
        assert mean == pytest.approx(np.exp(-2 * 0.3 * c), rel=1e-12)
