"""
Transient probabilities of the M|M|inf system and their use as
approximations of the M|M|m|m system for many servers.

Started empty, the M|M|inf occupancy at time ``t`` is Poisson with mean
``rho0 * beta``, ``beta = 1 - exp(-t / alpha)``. Started with one customer
it is that same law reweighted by ``beta + n / (rho0 (exp(t/alpha) - 1))``.
"""
from __future__ import annotations

import math

import numpy as np

from .asymptotics import RegimeTag, RegimeThresholds, classify_regime, saturation, stirling_factor
from .core import SystemParams, log_poisson_pmf

__all__ = ["approx_mmm_via_inf", "p0n_inf", "p1n_inf", "inf_vector", "poisson_support"]

_PMF_FLOOR = 1e-18
_SMALL_T = 1e-12


def _check_n(n):
    if n < 0 or int(n) != n:
        raise ValueError(f"n must be a non-negative integer, got {n}")


def p0n_inf(params: SystemParams, n: int, t: float) -> float:
    """P[N(t) = n | N(0) = 0] for M|M|inf (``params.m`` is ignored)."""
    _check_n(n)
    if not t >= 0:
        raise ValueError(f"t must be >= 0, got {t}")
    mean = params.rho0 * saturation(params, t)
    return float(np.exp(log_poisson_pmf(n, mean)))


def _weight(params: SystemParams, n, t: float):
    x = t / params.alpha
    tail = 0.0 if x > 700 else 1.0 / (params.rho0 * math.expm1(x))
    return saturation(params, t) + np.asarray(n, dtype=float) * tail


def p1n_inf(params: SystemParams, n: int, t: float) -> float:
    """P[N(t) = n | N(0) = 1] for M|M|inf (``params.m`` is ignored)."""
    _check_n(n)
    if not t > 0:
        raise ValueError(f"t must be > 0 (the formula is singular at t = 0), got {t}")
    if t < _SMALL_T * params.alpha:
        return 1.0 if n == 1 else 0.0
    return float(_weight(params, n, t) * p0n_inf(params, n, t))


def poisson_support(mean: float) -> int:
    """Last index kept when tabulating a Poisson(mean) law."""
    hi = int(math.ceil(mean + 12 * math.sqrt(mean) + 12))
    while log_poisson_pmf(hi, mean) > math.log(_PMF_FLOOR):
        hi += max(1, hi // 10)
    return hi


def inf_vector(params: SystemParams, t: float, n0: int = 0, n_max: int | None = None) -> np.ndarray:
    """
    M|M|inf occupancy law at time ``t`` over ``0..n_max``. Without
    ``n_max`` the support is cut where the pmf falls below 1e-18 past
    the mean plus twelve standard deviations.
    """
    if n0 not in (0, 1):
        raise ValueError(f"n0 must be 0 or 1, got {n0}")
    if not t >= 0:
        raise ValueError(f"t must be >= 0, got {t}")
    mean = params.rho0 * saturation(params, t)
    if n_max is None:
        n_max = poisson_support(mean)
    n = np.arange(n_max + 1)
    if n0 == 1:
        if t == 0:
            raise ValueError("t must be > 0 when n0 = 1")
        if t < _SMALL_T * params.alpha:
            return (n == 1).astype(float)
        return _weight(params, n, t) * np.exp(log_poisson_pmf(n, mean))
    return np.exp(log_poisson_pmf(n, mean))


_CASE_A = {RegimeTag.R1B, RegimeTag.R2B}
_CASE_B = {RegimeTag.R1C, RegimeTag.R2D}
_CASE_C = {RegimeTag.BLOCK0, RegimeTag.BLOCK1}


def approx_mmm_via_inf(
    params: SystemParams,
    n: int,
    t: float,
    n0: int,
    regime: RegimeTag | None = None,
    thresholds: RegimeThresholds | None = None,
) -> tuple[float, float]:
    """
    Approximate P[N(t) = n | N(0) = n0] of the loss system as
    ``factor * p_inf`` and return ``(value, factor)``.

    The factor is the Stirling factor of ``n`` in the bulk, 1 for few busy
    servers at moderate times, and the Stirling factor of ``m`` at the
    blocking state, where it is only an upper envelope.
    """
    if n0 not in (0, 1):
        raise ValueError(f"n0 must be 0 or 1, got {n0}")
    if not params.rho < 1:
        raise ValueError(f"needs rho < 1, got rho={params.rho}")
    if regime is None:
        regime = classify_regime(params, n, t, n0, thresholds)
    p_inf = p0n_inf if n0 == 0 else p1n_inf
    if regime in _CASE_A:
        factor = stirling_factor(n)
    elif regime in _CASE_B:
        factor = 1.0
    elif regime in _CASE_C:
        if n != params.m:
            raise ValueError(f"blocking regime needs n == m, got n={n}")
        factor = stirling_factor(params.m)
    else:
        raise ValueError(f"no M|M|inf approximation applies in regime {regime.value}")
    return factor * p_inf(params, n, t), factor
