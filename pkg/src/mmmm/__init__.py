"""Transient probabilities of the M|M|m|m Erlang loss system."""
from .asymptotics import (
    RegimeTag,
    RegimeThresholds,
    blocking_limit,
    blocking_probability,
    classify_regime,
    knessl_p0,
    knessl_p1,
    stirling_factor,
)
from .core import (
    NumericalFailure,
    SystemParams,
    TransientDistribution,
    build_generator,
    erlang_b,
    matrix_norm,
    norm_upper_bound,
    stationary,
)
from .exact import exact, exact_m1, exact_m2, spectral_decompose_m2
from .infinite_server import approx_mmm_via_inf, inf_vector, p0n_inf, p1n_inf
from .oracle import OracleConfig, integrate, integrate_matrix
from .series import TruncationReport, choose_truncation, error_bound, op_counts, truncated_expm

__version__ = "0.1.0"
