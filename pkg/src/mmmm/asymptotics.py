"""
Large-m asymptotic approximations of the loss-system transients, for a
system started empty (``n0 = 0``) or with one busy server (``n0 = 1``).

Notation: ``beta = 1 - exp(-t/alpha)`` is the M|M|inf saturation factor,
``rho = rho0 / m`` the per-server load, ``l = m - n`` the distance from the
blocking state. All expansions assume ``rho < 1``. Products such as
``(e/m)**m * rho0**m`` are evaluated as sums of logarithms.

Three expressions are evaluated in a corrected form by default; the
uncorrected literal form is available with ``printed=True``:

* R1C carries a spurious factor ``e`` that breaks the equality with the
  M|M|inf law started empty.
* R1D must keep ``ln(rho beta)`` inside the ``1/epsilon`` factor and raise
  ``rho beta`` to the power ``-l``; otherwise ``l = 0`` does not reproduce
  the blocking expansion nor its Erlang limit.

The R2A ``n = 0`` branch and R2C are evaluated in their literal form and
have no independent check.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .core import SystemParams, log_poisson_pmf

__all__ = [
    "RegimeTag",
    "RegimeThresholds",
    "ScaledState",
    "blocking_probability",
    "blocking_limit",
    "classify_regime",
    "knessl_p0",
    "knessl_p1",
    "saturation",
    "scaled_state",
    "stirling_factor",
]


class RegimeTag(str, enum.Enum):
    R1A = "R1A"
    R1B = "R1B"
    R1C = "R1C"
    R1D = "R1D"
    R2A = "R2A"
    R2B = "R2B"
    R2C = "R2C"
    R2D = "R2D"
    R2E = "R2E"
    BLOCK0 = "BLOCK0"
    BLOCK1 = "BLOCK1"


_FROM_EMPTY = {RegimeTag.R1A, RegimeTag.R1B, RegimeTag.R1C, RegimeTag.R1D, RegimeTag.BLOCK0}
_FROM_ONE = {RegimeTag.R2A, RegimeTag.R2B, RegimeTag.R2C, RegimeTag.R2D, RegimeTag.R2E, RegimeTag.BLOCK1}


@dataclass(frozen=True)
class RegimeThresholds:
    """
    Cut-offs turning order-of-magnitude domains into a decision rule.

    ``small``: largest ``n`` (or ``m - n``) treated as O(1).
    ``tau``: largest ``m t`` treated as stretched time, t = O(1/m).
    ``half``: largest ``sqrt(m) t`` treated as t = O(m**-1/2).
    """

    small: int = 5
    tau: float = 10.0
    half: float = 3.0


@dataclass(frozen=True)
class ScaledState:
    x: float
    tau: float
    beta: float


def saturation(params: SystemParams, t: float) -> float:
    """``1 - exp(-t / alpha)``."""
    return -math.expm1(-t / params.alpha)


def scaled_state(params: SystemParams, n: int, t: float) -> ScaledState:
    if not 0 <= n <= params.m:
        raise ValueError(f"n must lie in 0..{params.m}, got {n}")
    return ScaledState(x=n * params.epsilon, tau=params.m * t, beta=saturation(params, t))


def stirling_factor(n: int) -> float:
    """``n! / sqrt(2 pi n) * (e/n)**n``; decreases to 1."""
    if n < 1:
        raise ValueError(f"stirling_factor needs n >= 1, got {n}")
    return math.exp(gammaln(n + 1) - 0.5 * math.log(2 * math.pi * n) + n - n * math.log(n))


def classify_regime(
    params: SystemParams,
    n: int,
    t: float,
    n0: int,
    thresholds: RegimeThresholds | None = None,
) -> RegimeTag:
    """
    Pick the expansion whose domain contains ``(n, t)``.

    ``n == m`` is the blocking state. Otherwise, when ``n`` or ``m - n`` is
    at most ``thresholds.small`` the nearer end wins: near the top the
    ``m - n = O(1)`` expansion applies; near the bottom the time scale picks
    between stretched time (``m t <= tau``), the ``t = O(m**-1/2)`` layer
    (``n0 = 1`` only, ``sqrt(m) t <= half``) and ``t = O(1)``. Everything
    else is the bulk.
    """
    if n0 not in (0, 1):
        raise ValueError(f"n0 must be 0 or 1, got {n0}")
    if not 0 <= n <= params.m:
        raise ValueError(f"n must lie in 0..{params.m}, got {n}")
    th = thresholds or RegimeThresholds()
    m = params.m
    if n == m:
        return RegimeTag.BLOCK0 if n0 == 0 else RegimeTag.BLOCK1
    l = m - n
    near_top = l <= th.small
    near_bottom = n <= th.small
    if near_top and not (near_bottom and n <= l):
        return RegimeTag.R1D if n0 == 0 else RegimeTag.R2E
    if near_bottom:
        if t * m <= th.tau:
            return RegimeTag.R1A if n0 == 0 else RegimeTag.R2A
        if n0 == 1 and t * math.sqrt(m) <= th.half:
            return RegimeTag.R2C
        return RegimeTag.R1C if n0 == 0 else RegimeTag.R2D
    return RegimeTag.R1B if n0 == 0 else RegimeTag.R2B


def _check(params: SystemParams, n: int, t: float):
    if not params.rho < 1:
        raise ValueError(f"the expansions need rho < 1, got rho={params.rho}")
    if not 0 <= n <= params.m:
        raise ValueError(f"n must lie in 0..{params.m}, got {n}")
    if not t >= 0:
        raise ValueError(f"t must be >= 0, got {t}")


def _need_positive_t(t, case):
    if not t > 0:
        raise ValueError(f"{case.value} divides by 1 - exp(-t/alpha); needs t > 0")


def _blocking_log_tail(params: SystemParams, b: float) -> float:
    """log of ``(e/m)**m (rho0 b)**m exp(-rho0 b)``."""
    m = params.m
    rb = params.rho0 * b
    return m - m * math.log(m) + m * math.log(rb) - rb


def knessl_p0(
    params: SystemParams,
    n: int,
    t: float,
    case: RegimeTag | None = None,
    printed: bool = False,
    thresholds: RegimeThresholds | None = None,
) -> float:
    """Approximate P[N(t) = n | N(0) = 0] for large ``m``."""
    _check(params, n, t)
    case = RegimeTag(case) if case is not None else classify_regime(params, n, t, 0, thresholds)
    if case not in _FROM_EMPTY:
        raise ValueError(f"{case.value} is not an expansion for n0 = 0")
    b = saturation(params, t)
    r0, rho, m = params.rho0, params.rho, params.m

    if case is RegimeTag.R1A:
        # lambda * tau = lambda0 * t
        return float(np.exp(log_poisson_pmf(n, params.lambda0 * t)))
    if case is RegimeTag.R1B:
        if n < 1:
            raise ValueError("R1B needs n >= 1")
        _need_positive_t(t, case)
        log_p = n * math.log(r0 * b / n) + n - r0 * b - 0.5 * math.log(2 * math.pi * n)
        return math.exp(log_p)
    if case is RegimeTag.R1C:
        log_p = float(log_poisson_pmf(n, r0 * b))
        if printed:
            log_p += 1.0
        return math.exp(log_p)
    if case is RegimeTag.BLOCK0:
        if n != m:
            raise ValueError(f"BLOCK0 needs n == m, got n={n}")
        if not printed:
            return blocking_probability(params, 0, t)
    _need_positive_t(t, case)
    l = m - n
    rb = rho * b
    brace_power = -1 if printed else -l
    brace = rb ** brace_power - rho * math.exp(-t / params.alpha) / (rho - 1 / b) * b ** l
    if printed:
        log_tail = m * (1 - rb) + math.log(rb)
    else:
        log_tail = m * (1 - rb + math.log(rb))
    return math.sqrt(params.epsilon / (2 * math.pi)) * brace * math.exp(log_tail)


def knessl_p1(
    params: SystemParams,
    n: int,
    t: float,
    case: RegimeTag | None = None,
    thresholds: RegimeThresholds | None = None,
) -> float:
    """Approximate P[N(t) = n | N(0) = 1] for large ``m``."""
    _check(params, n, t)
    case = RegimeTag(case) if case is not None else classify_regime(params, n, t, 1, thresholds)
    if case not in _FROM_ONE:
        raise ValueError(f"{case.value} is not an expansion for n0 = 1")
    b = saturation(params, t)
    r0, m, a = params.rho0, params.m, params.alpha

    if case is RegimeTag.R2A:
        if n >= 1:
            return float(np.exp(log_poisson_pmf(n - 1, params.lambda0 * t)))
        # transcribed as is; can exceed 1 once t > alpha
        return math.exp(-params.lam * t) * (t / a) ** (1 - n)
    if case is RegimeTag.R2C:
        if n < 1:
            raise ValueError("R2C is undefined for n = 0")
        pref = math.exp(-m * params.lambda0 * t + 0.5 * (params.lambda0 / a) * t * t)
        pref /= math.sqrt(m ** (1 - n))
        s = t / a * math.sqrt(m)
        total = sum(n * (r0 / m) ** (n - l) * s ** (n + 1 - 2 * l) for l in range(n + 1))
        return pref * total / math.factorial(n - 1)
    if case is RegimeTag.R2D:
        return b * float(np.exp(log_poisson_pmf(n, r0 * b)))
    if case is RegimeTag.BLOCK1:
        if n != m:
            raise ValueError(f"BLOCK1 needs n == m, got n={n}")
        return blocking_probability(params, 1, t)

    _need_positive_t(t, case)
    x = t / a
    tail_rate = 0.0 if x > 700 else 1.0 / (r0 * math.expm1(x))
    if case is RegimeTag.R2B:
        if n < 1:
            raise ValueError("R2B needs n >= 1")
        weight = b + n * tail_rate
        log_p = n - n * math.log(n) - r0 * b + n * math.log(r0 * b) - 0.5 * math.log(2 * math.pi * n)
        return weight * math.exp(log_p)
    # R2E
    l = m - n
    weight = b + m * tail_rate
    bracket = (r0 * b / m) ** (-l) - r0 * math.exp(-x) / (r0 - m / b) * b ** l
    return weight * bracket * math.exp(_blocking_log_tail(params, b)) / math.sqrt(2 * math.pi * m)


def blocking_probability(params: SystemParams, n0: int, t: float) -> float:
    """Asymptotic transient blocking probability P[N(t) = m | N(0) = n0], n0 in {0, 1}."""
    if n0 not in (0, 1):
        raise ValueError(f"n0 must be 0 or 1, got {n0}")
    _check(params, params.m, t)
    if not t > 0:
        raise ValueError("the blocking expansion needs t > 0")
    b = saturation(params, t)
    m, r0, rho = params.m, params.rho0, params.rho
    if n0 == 0:
        ratio = (rho * b - 1 / b) / (rho - 1 / b)
        log_tail = m * (1 - rho * b + math.log(rho * b))
        return math.sqrt(params.epsilon / (2 * math.pi)) * ratio * math.exp(log_tail)
    x = t / params.alpha
    tail_rate = 0.0 if x > 700 else 1.0 / (r0 * math.expm1(x))
    ratio = (r0 * b - m / b) / (r0 - m / b)
    weight = b + m * tail_rate
    return ratio * weight * math.exp(_blocking_log_tail(params, b)) / math.sqrt(2 * math.pi * m)


def blocking_limit(params: SystemParams) -> float:
    """Long-time limit of both blocking expansions: the Stirling-form Erlang value."""
    m, r0 = params.m, params.rho0
    return math.exp(m - m * math.log(m) + m * math.log(r0) - r0) / math.sqrt(2 * math.pi * m)
