"""Single-row zonal polynomials and the rank-1 group-integral identities.

Only single-row partitions survive at rank 1 (a rank-1 Y has one nonzero
eigenvalue, and Z_p(Y) vanishes unless p = (k)), so everything reduces to
power series in one variable:

    real (O(N)):          prod_i (1 - 2 theta x_i)^(-1/2)
                          = sum_k theta^k (2k-1)!! Z_(k)(X) / k!
    complex (U(N)):       prod_i (1 - 2 theta x_i)^(-1)
                          = sum_k (2 theta)^k C_(k)(X)
    quaternionic (Sp(N)): prod_i (1 - 2 theta x_i)^(-2)
                          = sum_k (2 theta)^k (k+1) Q_(k)(X)

extracted by convolving per-factor binomial series.  The companion contour
integrals

    S_p(y) = (1 / 2 pi i) oint e^{M t} prod_i (t - x_i y)^(-p/2) dt,  p = 1, 2, 4

evaluate by residue at infinity to hypergeometric-type series in the same
coefficients, and for p = 1 match the Haar O(N) average of
e^{+ M y sum x_i g_iN^2} up to M^{N/2 - 1} / Gamma(N/2).  Factorials and
double factorials go through log-gamma so k up to 60 stays in range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .params import ContourSpec, make_contour

__all__ = [
    "ZonalSeries",
    "zonal_row",
    "zonal_I_closed_form",
    "contour_S",
    "series_S",
    "haar_series",
    "zonal_identity_check",
    "unitary_symplectic_identity_check",
]

_POWERS = {"real": 1, "complex": 2, "quaternionic": 4}


def _log_double_factorial(k: int) -> float:
    """log (2k - 1)!! = log Gamma(2k + 1) - k log 2 - log Gamma(k + 1)."""
    return math.lgamma(2 * k + 1) - k * math.log(2.0) - math.lgamma(k + 1)


@dataclass(frozen=True)
class ZonalSeries:
    x_eigs: np.ndarray
    max_k: int
    family: str
    values: np.ndarray      # Z_(k)(X) (or C/Q analogue), k = 0..max_k

    def __getitem__(self, k: int) -> float:
        return float(self.values[k])


def zonal_row(x_eigs, max_k: int, family: str = "real") -> ZonalSeries:
    """Z_(k)(X) for k = 0..max_k from the generating-function expansion.

    Convolves the per-eigenvalue binomial series of (1 - 2 theta x)^(-p/2)
    and strips the family-specific normalisation.
    """
    if family not in _POWERS:
        raise ConfigError(f"family must be one of {sorted(_POWERS)}")
    if not 0 <= max_k <= 60:
        raise ConfigError("max_k must lie in 0..60 (log-factorial guard)")
    x = np.asarray(x_eigs, dtype=float)
    p = _POWERS[family]
    ks = np.arange(max_k + 1)
    # (1 - z)^(-p/2) = sum_m binom(m + p/2 - 1, m) z^m with z = 2 theta x
    log_binom = (np.array([math.lgamma(m + p / 2.0) for m in ks])
                 - math.lgamma(p / 2.0)
                 - np.array([math.lgamma(m + 1.0) for m in ks]))
    series = np.zeros(max_k + 1)
    series[0] = 1.0
    for xi in x:
        factor = np.exp(log_binom) * (2.0 * xi) ** ks
        series = np.convolve(series, factor)[: max_k + 1]
    # strip normalisation: theta^k coefficient -> Z_(k)
    if family == "real":
        norm = np.exp(np.array([_log_double_factorial(int(k)) for k in ks])
                      - np.array([math.lgamma(k + 1.0) for k in ks]))
    elif family == "complex":
        norm = 2.0**ks
    else:
        norm = (ks + 1.0) * 2.0**ks
    return ZonalSeries(x, max_k, family, series / norm)


def zonal_I_closed_form(N: int, k: int) -> float:
    """Z_(k)(I_N) = Gamma(N/2 + k) 2^k / (Gamma(N/2) (2k - 1)!!)."""
    return math.exp(math.lgamma(N / 2.0 + k) + k * math.log(2.0)
                    - math.lgamma(N / 2.0) - _log_double_factorial(k))


def contour_S(M: int, x_eigs, y: float, power: int,
              contour: ContourSpec | None = None) -> complex:
    """(1 / 2 pi i) oint e^{M t} prod_i (t - x_i y)^(-power/2) dt."""
    x = np.asarray(x_eigs, dtype=float)
    sing = x * y
    if contour is None:
        hi = float(np.max(np.abs(sing))) if sing.size else 0.0
        contour = make_contour(2.0 * hi + 1.0, node_count=128, margin=0.5)
    if np.any(np.abs(sing - contour.center) >= 0.999 * contour.radius):
        raise ConfigError("contour does not enclose all x_i * y")
    t = contour.nodes[:, None]
    vals = np.exp(M * contour.nodes) * np.prod((t - sing) ** (-power / 2.0), axis=1)
    return complex(np.sum(contour.weights * vals)) / (2.0j * np.pi)


def _u_coefficients(Z: ZonalSeries) -> np.ndarray:
    """A_k with prod_i (1 - u x_i)^(-p/2) = sum_k u^k A_k, from zonal values."""
    ks = np.arange(Z.max_k + 1)
    if Z.family == "real":
        scale = np.exp(np.array([_log_double_factorial(int(k)) for k in ks])
                       - np.array([math.lgamma(k + 1.0) for k in ks])
                       - ks * math.log(2.0))
    elif Z.family == "complex":
        scale = np.ones_like(ks, dtype=float)
    else:
        scale = ks + 1.0
    return Z.values * scale


def series_S(M: int, N: int, x_eigs, y: float, power: int, max_k: int = 50,
             return_tail: bool = False):
    """The contour integral by residue at infinity, as a zonal series.

    With prod_i (t - x_i y)^(-p/2) = t^(-pN/2) sum_k (y/t)^k A_k, the t^{-1}
    coefficient of the product with e^{M t} is

        S = sum_k A_k y^k M^(pN/2 + k - 1) / Gamma(pN/2 + k).

    Requires p*N even so the integrand is single-valued at infinity.
    """
    if (power * N) % 2:
        raise ConfigError("residue series needs power * N even")
    family = {1: "real", 2: "complex", 4: "quaternionic"}[power]
    A = _u_coefficients(zonal_row(x_eigs, max_k, family))
    total = 0.0
    last = 0.0
    half = power * N / 2.0
    for k in range(max_k + 1):
        j = half + k - 1.0
        if j < 0:
            continue
        last = A[k] * (y**k) * math.exp(j * math.log(M) - math.lgamma(j + 1.0))
        total += last
    if return_tail:
        return total, abs(last)
    return total


def haar_series(M: int, N: int, x_eigs, y: float, max_k: int = 50) -> float:
    """Zonal expansion of the Haar O(N) average of e^{+ M y sum x_i g_iN^2}:

        sum_k (M y)^k Z_(k)(X) / (k! Z_(k)(I_N)),

    valid for every N (the contour/residue route needs N even, this does not).
    """
    Z = zonal_row(x_eigs, max_k, "real")
    total = 0.0
    for k in range(max_k + 1):
        total += ((M * y) ** k * Z[k]
                  * math.exp(-math.lgamma(k + 1.0)) / zonal_I_closed_form(N, k))
    return total


def zonal_identity_check(M: int, x_eigs, y: float, max_k: int = 50,
                         mc=None) -> dict:
    """Three-way check for the O(N) case: contour, residue series, Haar MC.

    The contour and residue-series legs require N even; the zonal expansion
    of the group average works for every N and is what an `mc` (mean, se)
    pair for e^{+ M y sum x_i g_iN^2} is compared against (positive-exponent
    convention; callers sampling e^{- M y ...} pass y -> -y first).
    """
    x = np.asarray(x_eigs, dtype=float)
    N = x.size
    hs = haar_series(M, N, x, y, max_k=max_k)
    out = {"haar_series": hs}
    if N % 2 == 0:
        ct = contour_S(M, x, y, power=1)
        se_val, tail = series_S(M, N, x, y, power=1, max_k=max_k, return_tail=True)
        out.update({
            "contour": ct,
            "series": se_val,
            "rel_dev": abs(ct - se_val) / max(abs(se_val), 1e-300),
            "series_tail": tail / max(abs(se_val), 1e-300),
            # appendix proportionality: S = M^(N/2-1) / Gamma(N/2) * group average
            "proportionality_dev": abs(
                se_val - math.exp((N / 2.0 - 1.0) * math.log(M)
                                  - math.lgamma(N / 2.0)) * hs
            ) / max(abs(se_val), 1e-300),
        })
    if mc is not None:
        mean, se = mc
        out["mc_sigmas"] = abs(hs - mean) / se
    return out


def unitary_symplectic_identity_check(M: int, x_eigs, y: float,
                                      max_k: int = 50, mc_unitary=None) -> dict:
    """Series vs contour for the U(N) (simple poles) and Sp (double poles) cases."""
    x = np.asarray(x_eigs, dtype=float)
    N = x.size
    out = {}
    for label, power in (("unitary", 2), ("symplectic", 4)):
        ct = contour_S(M, x, y, power=power)
        se_val, tail = series_S(M, N, x, y, power=power, max_k=max_k, return_tail=True)
        out[label] = {
            "contour": ct,
            "series": se_val,
            "rel_dev": abs(ct - se_val) / max(abs(se_val), 1e-300),
            "series_tail": tail / max(abs(se_val), 1e-300),
        }
    if mc_unitary is not None:
        mean, se = mc_unitary
        C = zonal_row(x, max_k, "complex")
        hs = sum((M * y) ** k * C[k] * math.exp(
            math.lgamma(k + 1.0) + math.lgamma(float(N))
            - math.lgamma(N + float(k)) - math.lgamma(k + 1.0))
            for k in range(max_k + 1))
        out["unitary"]["haar_series"] = hs
        out["unitary"]["mc_sigmas"] = abs(hs - mean) / se
    return out
