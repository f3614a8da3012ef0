"""
System parameters, generator matrix, column norm and stationary law of the
M|M|m|m (Erlang loss) system.

Conventions
-----------
The generator ``A`` acts on column vectors of state probabilities,
``dP/dt = A @ P``, so every column of ``A`` sums to zero. Transition matrices
returned anywhere in this package are indexed the other way round,
``P[i, j] = P[N(t) = j | N(0) = i]``, i.e. they equal ``expm(t * A).T`` and
their rows sum to one.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import gammaln, logsumexp

__all__ = [
    "DEFAULT_MAX_M",
    "NumericalFailure",
    "SystemParams",
    "TransientDistribution",
    "build_generator",
    "erlang_b",
    "log_poisson_pmf",
    "matrix_norm",
    "max_servers",
    "norm_upper_bound",
    "stationary",
]

DEFAULT_MAX_M = 1000


class NumericalFailure(RuntimeError):
    """A computation ran out of its step or term budget."""


def max_servers() -> int:
    """Cap on ``m`` for dense-matrix routes; ``MMMM_MAX_M`` overrides it."""
    raw = os.environ.get("MMMM_MAX_M")
    if raw is None:
        return DEFAULT_MAX_M
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"MMMM_MAX_M must be an integer, got {raw!r}") from None
    if cap < 1:
        raise ValueError(f"MMMM_MAX_M must be >= 1, got {cap}")
    return cap


@dataclass(frozen=True)
class SystemParams:
    """
    An M|M|m|m loss system.

    Parameters
    ----------
    lambda0 : float
        Poisson arrival rate.
    alpha : float
        Mean service time; each busy server completes at rate ``1 / alpha``.
    m : int
        Number of servers (and system capacity).
    """

    lambda0: float
    alpha: float
    m: int

    def __post_init__(self):
        if not (self.lambda0 > 0 and math.isfinite(self.lambda0)):
            raise ValueError(f"lambda0 must be a positive finite number, got {self.lambda0}")
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be a positive finite number, got {self.alpha}")
        if isinstance(self.m, bool) or int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be an integer >= 1, got {self.m}")
        object.__setattr__(self, "m", int(self.m))

    @classmethod
    def from_rates(cls, lambda0: float, mu: float, m: int) -> "SystemParams":
        """Build from the per-server service rate ``mu = 1 / alpha``."""
        if not mu > 0:
            raise ValueError(f"mu must be positive, got {mu}")
        return cls(lambda0, 1.0 / mu, m)

    @property
    def mu(self) -> float:
        return 1.0 / self.alpha

    @property
    def rho0(self) -> float:
        """Offered load ``lambda0 * alpha``."""
        return self.lambda0 * self.alpha

    @property
    def rho(self) -> float:
        """Load per server ``rho0 / m``."""
        return self.rho0 / self.m

    @property
    def epsilon(self) -> float:
        return 1.0 / self.m

    @property
    def lam(self) -> float:
        """Arrival rate per server, ``lambda0 / m``."""
        return self.lambda0 / self.m


@dataclass(frozen=True)
class TransientDistribution:
    """Occupancy distribution at time ``t`` started from ``n0`` busy servers."""

    t: float
    n0: int
    probabilities: np.ndarray
    method: str
    error_bound: Optional[float] = None
    # method-specific extras (truncation report, regimes, drift, ...)
    info: dict = field(default_factory=dict)


def build_generator(params: SystemParams, scaled: bool = False) -> np.ndarray:
    """
    Tridiagonal infinitesimal generator of the occupancy process.

    With ``scaled=True`` the matrix is multiplied by ``alpha``; its entries
    are then ``rho0`` and the integers ``n``, so ``expm(t * A)`` equals
    ``expm((t / alpha) * B)``.
    """
    m = params.m
    if m > max_servers():
        raise ValueError(f"m={m} exceeds the dense-matrix cap {max_servers()} (set MMMM_MAX_M)")
    if scaled:
        up, down = params.rho0, 1.0
    else:
        up, down = params.lambda0, 1.0 / params.alpha
    n = np.arange(m + 1, dtype=float)
    A = np.zeros((m + 1, m + 1))
    idx = np.arange(m)
    A[idx + 1, idx] = up
    A[idx, idx + 1] = n[1:] * down
    diag = -(up + n * down)
    diag[m] = -m * down
    A[np.arange(m + 1), np.arange(m + 1)] = diag
    return A


def matrix_norm(M) -> float:
    """Largest absolute column sum of a square matrix."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if M.size == 0:
        return 0.0
    return float(np.abs(M).sum(axis=0).max())


def norm_upper_bound(params: SystemParams) -> float:
    return 2.0 * (params.lambda0 + params.m / params.alpha)


def stationary(params: SystemParams) -> np.ndarray:
    """
    Stationary (and limiting) occupancy distribution, a Poisson(rho0) law
    truncated to ``0..m``.

    The unnormalised weights ``rho0**n / n!`` are accumulated in log space
    through the ratio ``rho0 / n``, so large ``m`` and ``rho0`` do not
    overflow.
    """
    m = params.m
    log_ratio = math.log(params.rho0) - np.log(np.arange(1, m + 1, dtype=float))
    log_w = np.concatenate(([0.0], np.cumsum(log_ratio)))
    return np.exp(log_w - logsumexp(log_w))


def erlang_b(params: SystemParams) -> float:
    """Erlang loss probability via ``B(k) = r B(k-1) / (k + r B(k-1))``."""
    r = params.rho0
    b = 1.0
    for k in range(1, params.m + 1):
        b = r * b / (k + r * b)
    return b


def log_poisson_pmf(n, mean: float):
    """Elementwise ``log(mean**n exp(-mean) / n!)``; ``mean = 0`` is allowed."""
    n = np.asarray(n, dtype=float)
    if mean == 0:
        return np.where(n == 0, 0.0, -np.inf)
    return n * math.log(mean) - mean - gammaln(n + 1)
