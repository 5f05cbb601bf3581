import math

import numpy as np
import pytest

from wishart_lab import (ConfigError, McConfig, ModelParams, contour_S,
                         haar_orthogonal_integral, haar_series,
                         haar_unitary_integral, series_S, zonal_I_closed_form,
                         zonal_identity_check, zonal_row,
                         unitary_symplectic_identity_check)


class TestZonalRow:
    def test_single_eigenvalue_powers(self):
        Z = zonal_row([0.7], 6, "real")
        for k in range(7):
            assert Z[k] == pytest.approx(0.7**k, rel=1e-13)

    def test_first_coefficient_is_trace(self):
        assert zonal_row([0.2, 0.5, 0.9], 1, "real")[1] == pytest.approx(1.6)
        assert zonal_row([0.2, 0.5, 0.9], 1, "complex")[1] == pytest.approx(1.6)

    def test_identity_matrix_closed_form(self):
        for N in (2, 4, 6):
            Z = zonal_row(np.ones(N), 6, "real")
            for k in range(7):
                cf = zonal_I_closed_form(N, k)
                assert Z[k] == pytest.approx(cf, rel=1e-10)

    def test_n2_k2_value(self):
        # Gamma(2)! route: Z_(2)(I_2) = 2! * 4 / (0! * 3) = 8/3
        assert zonal_row([1.0, 1.0], 2, "real")[2] == pytest.approx(8 / 3, rel=1e-13)

    def test_complex_family_is_complete_homogeneous(self):
        x = [0.3, 0.7]
        C = zonal_row(x, 3, "complex")
        h2 = x[0] ** 2 + x[0] * x[1] + x[1] ** 2
        assert C[2] == pytest.approx(h2, rel=1e-13)

    def test_guards(self):
        with pytest.raises(ConfigError):
            zonal_row([1.0], 61, "real")
        with pytest.raises(ConfigError):
            zonal_row([1.0], 5, "octonionic")


class TestSeriesVsContour:
    def test_real_case(self):
        rep = zonal_identity_check(2, [0.1, 0.2, 0.3, 0.4], 0.5, max_k=50)
        assert rep["rel_dev"] < 1e-8
        assert rep["series_tail"] < 1e-20
        assert rep["proportionality_dev"] < 1e-12

    def test_y_zero_reduces_to_k0_term(self):
        x = [0.1, 0.2, 0.3, 0.4]
        N, M = 4, 2
        ct = contour_S(M, x, 0.0, power=1)
        k0 = math.exp((N / 2 - 1) * math.log(M) - math.lgamma(N / 2))
        assert ct == pytest.approx(k0, rel=1e-10)

    def test_unitary_single_pole(self):
        # U(1): oint e^{Mt} (t - x y)^{-1} dt / (2 pi i) = e^{M x y}
        assert contour_S(3, [0.5], 0.4, power=2) == pytest.approx(
            np.exp(3 * 0.5 * 0.4), rel=1e-10)

    def test_symplectic_double_pole(self):
        # Sp, N = 1: residue of e^{Mt}/(t - x y)^2 is M e^{M x y}
        assert contour_S(3, [0.5], 0.4, power=4) == pytest.approx(
            3 * np.exp(3 * 0.5 * 0.4), rel=1e-10)

    def test_unitary_and_symplectic_series(self):
        rep = unitary_symplectic_identity_check(1, [0.3, 0.7], 0.4, max_k=50)
        assert rep["unitary"]["rel_dev"] < 1e-8
        assert rep["symplectic"]["rel_dev"] < 1e-8

    def test_odd_N_needs_no_contour(self):
        with pytest.raises(ConfigError):
            series_S(1, 3, [0.2, 0.5, 0.9], 0.3, power=1)


class TestMonteCarloThreeWay:
    def test_haar_orthogonal_vs_series(self):
        pdummy = ModelParams(2, 4, 0.0)
        mean, se = haar_orthogonal_integral(McConfig(5150, 200_000, pdummy),
                                            [0.2, 0.5, 0.9], -0.3, M=1)
        rep = zonal_identity_check(1, [0.2, 0.5, 0.9], 0.3, max_k=40,
                                   mc=(mean, se))
        assert rep["mc_sigmas"] < 3.0

    def test_haar_unitary_vs_series(self):
        pdummy = ModelParams(2, 4, 0.0)
        mcu = haar_unitary_integral(McConfig(5151, 100_000, pdummy),
                                    [0.3, 0.7], -0.4, M=1)
        rep = unitary_symplectic_identity_check(1, [0.3, 0.7], 0.4, max_k=50,
                                                mc_unitary=mcu)
        assert rep["unitary"]["mc_sigmas"] < 3.0

    def test_haar_series_small_y_expansion(self):
        # at tiny y the series is 1 + M y tr(X)/N + O(y^2)
        x = [0.2, 0.5, 0.9]
        y = 1e-6
        val = haar_series(2, 3, x, y, max_k=10)
        assert val == pytest.approx(1.0 + 2 * y * sum(x) / 3, rel=1e-9)
