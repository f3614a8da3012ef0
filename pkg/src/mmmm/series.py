"""
Truncated Taylor series for ``expm(t A)`` with a-priori remainder bounds.

The remainder of the ``F``-term truncation is bounded in the column-sum norm
by ``z**F / F! * (F + 1) / (F + 1 - z)`` with ``z = t * 2 (lambda0 + m/alpha)``,
valid once ``F >= floor(z) + 1``. The same ``z`` can be written from rates,
from the offered load, or from the per-server load; the three spellings are
kept as named variants so callers can check they agree.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import NumericalFailure, SystemParams, build_generator

__all__ = [
    "BOUND_VARIANTS",
    "TruncationReport",
    "bound_argument",
    "choose_truncation",
    "error_bound",
    "op_counts",
    "truncated_expm",
]

BOUND_VARIANTS = ("rates", "load", "per_server")
DEFAULT_F_CAP = 1_000_000


@dataclass(frozen=True)
class TruncationReport:
    F: int
    error_bound: float
    phi: int
    theta: int
    bound_variant: str = "rates"


def bound_argument(params: SystemParams, t: float, variant: str = "rates") -> float:
    if variant == "rates":
        return 2 * t * (params.lambda0 + params.m / params.alpha)
    if variant == "load":
        return (2 * t / params.alpha) * (params.rho0 + params.m)
    if variant == "per_server":
        return (2 * t / params.alpha) * params.m * (params.rho + 1)
    raise ValueError(f"unknown bound variant {variant!r}; expected one of {BOUND_VARIANTS}")


def _bound(z: float, F: int) -> Optional[float]:
    if F < math.floor(z) + 1:
        return None
    if z == 0:
        return 0.0
    log_b = F * math.log(z) - math.lgamma(F + 1) + math.log(F + 1) - math.log(F + 1 - z)
    return math.exp(log_b) if log_b < 709.0 else math.inf


def error_bound(params: SystemParams, t: float, F: int, variant: str = "rates") -> Optional[float]:
    """
    Upper bound on the column-sum norm of the series remainder.

    Returns ``None`` when ``F`` is below ``floor(z) + 1`` and the bound does
    not apply.
    """
    if not t >= 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if F < 0:
        raise ValueError(f"F must be >= 0, got {F}")
    return _bound(bound_argument(params, t, variant), F)


def op_counts(F: int, m: int) -> tuple[int, int]:
    """Multiplications and additions charged for an ``F``-term evaluation."""
    if F < 1 or m < 1:
        raise ValueError(f"op_counts needs F >= 1 and m >= 1, got F={F}, m={m}")
    phi = (F - 1) * (m + 1) ** 3 + (m + 1) ** 2 + F ** 2
    theta = (F - 1) * (m + 1) ** 3 + m * (m - 1)
    return phi, theta


def choose_truncation(
    params: SystemParams,
    t: float,
    tol: float,
    variant: str = "rates",
    cap: int = DEFAULT_F_CAP,
) -> TruncationReport:
    """Smallest valid ``F`` whose remainder bound is at most ``tol``."""
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if not t >= 0:
        raise ValueError(f"t must be >= 0, got {t}")
    z = bound_argument(params, t, variant)
    F = math.floor(z) + 1
    while True:
        if F > cap:
            raise NumericalFailure(
                f"truncation order would exceed {cap} (lambda0={params.lambda0}, "
                f"alpha={params.alpha}, m={params.m}, t={t}, tol={tol})"
            )
        b = _bound(z, F)
        if b <= tol:
            break
        F += 1
    phi, theta = op_counts(F, params.m)
    return TruncationReport(F=F, error_bound=b, phi=phi, theta=theta, bound_variant=variant)


def truncated_expm(params: SystemParams, t: float, F: int, clamp: bool = False) -> np.ndarray:
    """
    Transition matrix from the first ``F + 1`` Taylor terms of ``expm(t A)``.

    Rows are not renormalised, so they can miss 1 by up to the remainder
    bound. A warning is issued when ``F`` is too small for any bound to
    apply. ``clamp=True`` zeroes negative entries.
    """
    if not t >= 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if F < 0:
        raise ValueError(f"F must be >= 0, got {F}")
    if error_bound(params, t, F) is None:
        warnings.warn(
            f"F={F} is below floor(z) + 1 for z={bound_argument(params, t):.6g}; "
            "no remainder bound is available",
            stacklevel=2,
        )
    # row-oriented generator so the result comes out as P[i, j]
    Q = build_generator(params).T
    term = np.eye(params.m + 1)
    total = term.copy()
    for j in range(1, F + 1):
        term = term @ Q * (t / j)
        total += term
    if clamp:
        np.clip(total, 0.0, None, out=total)
    return total
