"""
Closed-form transition matrices for one and two servers.

For two servers the generator is 3x3 with eigenvalues ``0`` and the two
roots of ``x**2 + (2*lambda0 + 3/alpha) x + lambda0**2 + 2 lambda0/alpha + 2/alpha**2``.
Both roots are real, negative and distinct, so ``expm(t A)`` is the sum of
three exponentials weighted by Sylvester projectors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import SystemParams, build_generator, stationary
from .oracle import OracleConfig, integrate_matrix

__all__ = ["SpectralDecomposition", "exact", "exact_m1", "exact_m2", "spectral_decompose_m2"]

_UNDERFLOW = 1e-300
_COINCIDENT = 1e-12


@dataclass(frozen=True)
class SpectralDecomposition:
    """
    ``eigenvalues[k]`` and projectors ``modes[k]`` of the generator, with
    ``expm(t A) = sum_k exp(t eigenvalues[k]) modes[k]``. ``modes[0]``
    belongs to the zero eigenvalue; each of its columns is the stationary
    vector.
    """

    eigenvalues: np.ndarray
    modes: np.ndarray

    def transition(self, t: float) -> np.ndarray:
        w = np.exp(t * self.eigenvalues)
        return np.tensordot(w, self.modes, axes=1).T


def _check_t(t):
    if not t >= 0:
        raise ValueError(f"t must be >= 0, got {t}")


def exact_m1(params: SystemParams, t: float) -> np.ndarray:
    if params.m != 1:
        raise ValueError(f"exact_m1 needs m == 1, got m={params.m}")
    _check_t(t)
    r = params.rho0
    decay = math.exp(-(params.lambda0 + 1.0 / params.alpha) * t)
    p00 = r / (1 + r) * decay + 1 / (1 + r)
    p01 = -r / (1 + r) * decay + r / (1 + r)
    p10 = -1 / (1 + r) * decay + 1 / (1 + r)
    p11 = 1 / (1 + r) * decay + r / (1 + r)
    return np.array([[p00, p01], [p10, p11]])


def _m2_roots(params: SystemParams):
    lam, mu = params.lambda0, 1.0 / params.alpha
    b = 2 * lam + 3 * mu
    c = lam * lam + 2 * lam * mu + 2 * mu * mu
    s = math.sqrt(mu * mu + 4 * lam * mu)
    fast = -(b + s) / 2
    # Vieta avoids the cancellation in -(b - s) / 2
    slow = c / fast
    return fast, slow


def spectral_decompose_m2(params: SystemParams) -> SpectralDecomposition:
    if params.m != 2:
        raise ValueError(f"spectral_decompose_m2 needs m == 2, got m={params.m}")
    fast, slow = _m2_roots(params)
    if abs(fast - slow) < _COINCIDENT * max(1.0, abs(fast)):
        raise ArithmeticError("eigenvalues coincide; closed form is degenerate")
    A = build_generator(params)
    I = np.eye(3)
    eig = np.array([0.0, slow, fast])
    modes = []
    for k in range(3):
        proj = I.copy()
        for j in range(3):
            if j != k:
                proj = proj @ (A - eig[j] * I) / (eig[k] - eig[j])
        modes.append(proj)
    return SpectralDecomposition(eigenvalues=eig, modes=np.array(modes))


def exact_m2(params: SystemParams, t: float, config: OracleConfig | None = None) -> np.ndarray:
    if params.m != 2:
        raise ValueError(f"exact_m2 needs m == 2, got m={params.m}")
    _check_t(t)
    try:
        spec = spectral_decompose_m2(params)
    except ArithmeticError:
        return integrate_matrix(params, t, config)
    if np.all(np.exp(t * spec.eigenvalues[1:]) < _UNDERFLOW):
        return np.tile(stationary(params), (3, 1))
    return spec.transition(t)


def exact(params: SystemParams, t: float) -> np.ndarray:
    """Closed-form transition matrix; only defined for ``m <= 2``."""
    if params.m == 1:
        return exact_m1(params, t)
    if params.m == 2:
        return exact_m2(params, t)
    raise ValueError(f"no closed form for m={params.m}; exact solutions exist only for m <= 2")
