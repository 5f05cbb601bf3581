"""Ensemble parameters, scalar weights, bulk density and contour geometry.

The model is the rank-1 spiked real Wishart ensemble: S = X X^T / M where X
is N x M with independent Gaussian columns of covariance
Sigma = diag(1 + tau, 1, ..., 1).  Everything downstream is parametrised by
(N, M, tau) plus the derived quantities

    tau_tilde = tau / (2 (1 + tau))        in [0, 1/2)
    gamma     = sqrt(N / M)                in (0, 1)

Two scalar weights drive all the special-function machinery:

    w(x; t) = exp(-M x / 2) x^((M-N-1)/2) (t - tau_tilde x)^(-1/2)
    w0(x)   = x^(M-N) exp(-M x)

with the square root taken on the principal branch (cut along the negative
real axis of t - tau_tilde x).  Note w0 != w^2; instead
w(x)^2 * x (t - tau_tilde x) = w0(x), an identity the kernel module leans on.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, SingularWeightError

__all__ = [
    "ModelParams",
    "ContourSpec",
    "weight_w",
    "weight_w0",
    "mp_edges",
    "mp_density",
    "make_contour",
]


@dataclass(frozen=True)
class ModelParams:
    """Dimensions and spike strength of the ensemble.

    N must be even and M > N (the finite-N formulas assume both).
    """

    N: int
    M: int
    tau: float
    tau_tilde: float = field(init=False)
    gamma: float = field(init=False)

    def __post_init__(self):
        if not (isinstance(self.N, (int, np.integer)) and self.N > 0 and self.N % 2 == 0):
            raise ConfigError(f"N must be a positive even integer, got {self.N!r}")
        if not (isinstance(self.M, (int, np.integer)) and self.M > self.N):
            raise ConfigError(f"M must be an integer > N, got {self.M!r}")
        if not (np.isfinite(self.tau) and self.tau >= 0):
            raise ConfigError(f"tau must be a finite real >= 0, got {self.tau!r}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "M", int(self.M))
        object.__setattr__(self, "tau", float(self.tau))
        object.__setattr__(self, "tau_tilde", self.tau / (2.0 * (1.0 + self.tau)))
        object.__setattr__(self, "gamma", math.sqrt(self.N / self.M))

    @property
    def alpha(self) -> int:
        """Laguerre exponent M - N of the weight w0."""
        return self.M - self.N

    def to_json(self) -> str:
        return json.dumps({"N": self.N, "M": self.M, "tau": self.tau})

    @classmethod
    def from_json(cls, text: str) -> "ModelParams":
        try:
            obj = json.loads(text)
            return cls(N=obj["N"], M=obj["M"], tau=obj["tau"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad ModelParams JSON: {exc}") from exc


def weight_w(params: ModelParams, t: complex, x):
    """Contour-dependent weight w(x; t), elementwise over x > 0.

    The factor (t - tau_tilde x)^(-1/2) uses the principal branch, i.e. the
    cut sits where arg(t - tau_tilde x) = pi.  Raises SingularWeightError if
    any x lands within machine distance of the branch point t / tau_tilde.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("weight_w requires x > 0")
    u = np.asarray(t - params.tau_tilde * x, dtype=complex)
    if np.any(np.abs(u) < 64 * np.finfo(float).eps * max(abs(t), 1.0)):
        raise SingularWeightError(f"t - tau_tilde*x vanished at t={t!r}")
    expo = 0.5 * (params.M - params.N - 1)
    vals = np.exp(-0.5 * params.M * x) * x**expo / np.sqrt(u)
    return vals if vals.ndim else complex(vals)


def weight_w0(params: ModelParams, x):
    """Laguerre weight w0(x) = x^(M-N) exp(-M x); positive on (0, inf)."""
    x = np.asarray(x, dtype=float)
    vals = x ** (params.M - params.N) * np.exp(-params.M * x)
    return vals if vals.ndim else float(vals)


def mp_edges(gamma: float) -> tuple[float, float]:
    """Bulk support edges for eigenvalues of X X^T / M with gamma^2 = N/M."""
    return (1.0 - gamma) ** 2, (1.0 + gamma) ** 2


def mp_density(params_or_gamma, lam):
    """Marchenko-Pastur bulk density of S = X X^T / M, elementwise in lam.

    Accepts either a ModelParams (gamma taken from it) or a bare aspect
    parameter gamma = sqrt(N/M) in (0, 1].  Normalised to unit mass:
    rho(lam) = sqrt((lam - b-) (b+ - lam)) / (2 pi gamma^2 lam) on [b-, b+].
    """
    gamma = params_or_gamma.gamma if isinstance(params_or_gamma, ModelParams) else float(params_or_gamma)
    if not 0 < gamma <= 1:
        raise ConfigError(f"gamma must lie in (0, 1], got {gamma}")
    lam = np.asarray(lam, dtype=float)
    b_minus, b_plus = mp_edges(gamma)
    inside = (lam > b_minus) & (lam < b_plus)
    rho = np.zeros_like(lam)
    lam_in = lam[inside]
    rho[inside] = np.sqrt((lam_in - b_minus) * (b_plus - lam_in)) / (2.0 * np.pi * gamma**2 * lam_in)
    return rho if rho.ndim else float(rho)


@dataclass(frozen=True)
class ContourSpec:
    """Discretised circle around [0, z], traversed counter-clockwise.

    Node phases are offset by half a step so no node is real.  `weights`
    are plain dt weights (trapezoidal in the angle, spectrally accurate for
    integrands analytic in an annulus); divide by 2*pi*i for
    residue-normalised sums, which `residue_weights` provides.
    """

    center: complex
    radius: float
    node_count: int
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def residue_weights(self) -> np.ndarray:
        return self.weights / (2.0j * np.pi)

    def rotated(self, fraction: float = 0.25) -> "ContourSpec":
        """Same circle with every node phase advanced by `fraction` of a step."""
        shift = 2.0 * np.pi * fraction / self.node_count
        theta = np.angle(self.nodes - self.center) + shift
        nodes = self.center + self.radius * np.exp(1j * theta)
        weights = (2.0j * np.pi / self.node_count) * self.radius * np.exp(1j * theta)
        return ContourSpec(self.center, self.radius, self.node_count, nodes, weights)

    def integrate(self, fvals) -> complex:
        """Plain contour integral of sampled values (fixed summation order)."""
        return complex(np.sum(np.asarray(fvals) * self.weights))


def make_contour(z: float, node_count: int = 64, margin: float = 0.5) -> ContourSpec:
    """Circle centered at z/2 with radius z/2 + margin, enclosing [0, z].

    node_count must be even and at least 8 so conjugate node pairs exist and
    none sits on the real axis (phases are 2*pi*(k + 1/2)/node_count).
    """
    if margin <= 0:
        raise ConfigError(f"margin must be positive, got {margin}")
    if node_count < 8 or node_count % 2:
        raise ConfigError(f"node_count must be even and >= 8, got {node_count}")
    if z <= 0:
        raise ConfigError(f"z must be positive, got {z}")
    center = complex(z / 2.0, 0.0)
    radius = z / 2.0 + margin
    k = np.arange(node_count)
    theta = 2.0 * np.pi * (k + 0.5) / node_count
    nodes = center + radius * np.exp(1j * theta)
    # dt = i R e^{i theta} dtheta with dtheta = 2 pi / n
    weights = (2.0j * np.pi / node_count) * radius * np.exp(1j * theta)
    return ContourSpec(center, radius, node_count, nodes, weights)
