"""Monte-Carlo and direct-integration oracles.

Samplers use numpy's Philox counter-based generator (pinned in pyproject),
so a seed fully determines every stream on every platform; Gaussian draws
go through the generator's deterministic transform, never OS entropy.
Sampling is chunked for memory but the draw order is fixed, so results are
independent of chunk size only if the chunk size itself is fixed -- it is,
as a module constant.

The group-integral oracles follow two sign conventions deliberately: the
sphere representation of the eigenvalue j.p.d.f. carries e^{+ M tau_tilde
sum lambda_j u_j^2}, while the rank-1 O(N) integral is stated as
e^{- M y sum x_i g_{iN}^2}.  The map between them is y -> -y; tests apply
it explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .params import ContourSpec, ModelParams

__all__ = [
    "McConfig",
    "sample_wishart_max_eig",
    "sample_wishart_all_eigs",
    "haar_orthogonal",
    "haar_unitary",
    "sphere_integral_oracle",
    "contour_integral_I",
    "haar_orthogonal_integral",
    "haar_unitary_integral",
]

_CHUNK = 20_000


@dataclass(frozen=True)
class McConfig:
    seed: int
    n_samples: int
    params: ModelParams

    def __post_init__(self):
        if self.n_samples < 1:
            raise ConfigError("n_samples must be >= 1")


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def sample_wishart_all_eigs(cfg: McConfig) -> np.ndarray:
    """Eigenvalues of S = X X^T / M, shape (n_samples, N), ascending.

    X has independent N(0, 1) entries with the first row scaled by
    sqrt(1 + tau): the spike's coordinate is immaterial by rotation
    invariance of the remaining rows.
    """
    p = cfg.params
    rng = _rng(cfg.seed)
    scale = math.sqrt(1.0 + p.tau)
    out = np.empty((cfg.n_samples, p.N))
    done = 0
    while done < cfg.n_samples:
        m = min(_CHUNK, cfg.n_samples - done)
        X = rng.standard_normal((m, p.N, p.M))
        X[:, 0, :] *= scale
        S = X @ np.swapaxes(X, 1, 2) / p.M
        out[done:done + m] = np.linalg.eigvalsh(S)
        done += m
    return out


def sample_wishart_max_eig(cfg: McConfig) -> np.ndarray:
    """Largest eigenvalue per sample; identical seed, identical stream."""
    return sample_wishart_all_eigs(cfg)[:, -1]


def haar_orthogonal(rng: np.random.Generator, n: int, count: int = 1) -> np.ndarray:
    """Haar-distributed O(n) matrices via QR with the R-diagonal sign fix."""
    g = rng.standard_normal((count, n, n))
    qs, rs = np.linalg.qr(g)
    d = np.sign(np.einsum("kii->ki", rs))
    d[d == 0] = 1.0
    return qs * d[:, None, :]


def haar_unitary(rng: np.random.Generator, n: int, count: int = 1) -> np.ndarray:
    """Haar-distributed U(n) matrices via complex QR with phase-fixed R."""
    g = (rng.standard_normal((count, n, n)) + 1j * rng.standard_normal((count, n, n))) / math.sqrt(2.0)
    qs, rs = np.linalg.qr(g)
    d = np.einsum("kii->ki", rs)
    d = d / np.abs(d)
    return qs * d[:, None, :]


def sphere_integral_oracle(cfg: McConfig, lambdas) -> tuple[float, float]:
    """MC estimate (mean, standard error) of the sphere representation.

    Averages exp(M tau_tilde sum lambda_j u_j^2) over uniform u on the unit
    sphere and multiplies by the tau-free prefactor prod exp(-M lambda_j / 2).
    Estimates the j.p.d.f.'s group integral up to a constant that cancels in
    ratios, which is how tests consume it.
    """
    p = cfg.params
    lambdas = np.asarray(lambdas, dtype=float)
    if lambdas.shape != (p.N,):
        raise ConfigError(f"need exactly N={p.N} eigenvalues")
    rng = _rng(cfg.seed)
    pref = math.exp(-0.5 * p.M * float(np.sum(lambdas)))
    vals = np.empty(cfg.n_samples)
    done = 0
    while done < cfg.n_samples:
        m = min(_CHUNK, cfg.n_samples - done)
        g = rng.standard_normal((m, p.N))
        u2 = g**2 / np.sum(g**2, axis=1, keepdims=True)
        vals[done:done + m] = np.exp(p.M * p.tau_tilde * (u2 @ lambdas))
        done += m
    mean = float(np.mean(vals)) * pref
    se = float(np.std(vals, ddof=1) / math.sqrt(cfg.n_samples)) * pref
    return mean, se


def contour_integral_I(params: ModelParams, lambdas, contour: ContourSpec) -> complex:
    """(1 / 2 pi i) oint e^{M t} prod_j (t - tau_tilde lambda_j)^{-1/2} dt.

    Times the same prod exp(-M lambda_j / 2) prefactor as the sphere oracle;
    the two agree up to one lambda-independent constant, so tests compare
    ratios across two eigenvalue vectors.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    sing = params.tau_tilde * lambdas
    if np.any(np.abs(sing - contour.center) >= contour.radius * 0.999):
        raise ConfigError("contour does not enclose all tau_tilde * lambda_j")
    pref = math.exp(-0.5 * params.M * float(np.sum(lambdas)))
    t = contour.nodes[:, None]
    integrand = np.exp(params.M * contour.nodes) * np.prod((t - sing) ** -0.5, axis=1)
    return pref * complex(np.sum(contour.weights * integrand)) / (2.0j * np.pi)


def haar_orthogonal_integral(cfg: McConfig, x_eigs, y: float,
                             M: int | None = None) -> tuple[float, float]:
    """MC estimate (mean, SE) of the O(N) integral of e^{-M y sum x_i g_iN^2}.

    The sign convention is the rank-1 group-integral one; pass -y to match
    oracles stated with a positive exponent.  The eigenvalue count may
    differ from cfg.params.N, and M may be overridden: the group integral is
    meaningful for scalars (N, M) that no Wishart ensemble admits.
    """
    x_eigs = np.asarray(x_eigs, dtype=float)
    n = x_eigs.size
    rng = _rng(cfg.seed)
    M = cfg.params.M if M is None else M
    vals = np.empty(cfg.n_samples)
    done = 0
    while done < cfg.n_samples:
        m = min(_CHUNK, cfg.n_samples - done)
        g = haar_orthogonal(rng, n, m)
        col = g[:, :, -1]
        vals[done:done + m] = np.exp(-M * y * (col**2 @ x_eigs))
        done += m
    return float(np.mean(vals)), float(np.std(vals, ddof=1) / math.sqrt(cfg.n_samples))


def haar_unitary_integral(cfg: McConfig, x_eigs, y: float,
                          M: int | None = None) -> tuple[float, float]:
    """Same as haar_orthogonal_integral but over U(N), with |g_iN|^2 weights."""
    x_eigs = np.asarray(x_eigs, dtype=float)
    n = x_eigs.size
    rng = _rng(cfg.seed)
    M = cfg.params.M if M is None else M
    vals = np.empty(cfg.n_samples)
    done = 0
    while done < cfg.n_samples:
        m = min(_CHUNK, cfg.n_samples - done)
        g = haar_unitary(rng, n, m)
        col = np.abs(g[:, :, -1]) ** 2
        vals[done:done + m] = np.exp(-M * y * (col @ x_eigs))
        done += m
    return float(np.mean(vals)), float(np.std(vals, ddof=1) / math.sqrt(cfg.n_samples))
