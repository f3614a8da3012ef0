"""
Acceptance gate. Every test carries a ``criterion`` marker; the terminal
summary prints one PASS/FAIL line per criterion number.

Printed table values live in ``golden.py``. Each check gathers all
mismatches before asserting so a failure lists every offending cell.
"""
import math
import time

import numpy as np
import pytest

from golden import (
    EXPERIMENT_A,
    EXPERIMENT_B,
    EXPERIMENT_C,
    EXPERIMENT_D_CASE2,
    EXPERIMENT_D_CASE3,
    EXPERIMENT_E_CASE1,
    EXPERIMENT_E_CASE2,
)
from mmmm import (
    SystemParams,
    blocking_limit,
    blocking_probability,
    choose_truncation,
    erlang_b,
    error_bound,
    exact_m1,
    exact_m2,
    inf_vector,
    knessl_p0,
    knessl_p1,
    p0n_inf,
    p1n_inf,
    stationary,
    stirling_factor,
    truncated_expm,
)
from mmmm.asymptotics import RegimeTag
from mmmm.core import matrix_norm
from mmmm.oracle import OracleConfig, integrate, integrate_matrix
from mmmm.render import round_half_up
from mmmm.series import bound_argument

criterion = pytest.mark.criterion

# arrival rates that reproduce the printed values of the small-system tables
ONE_SERVER = {2: 0.4, 3: 0.9}
TWO_SERVER = {1: 0.05, 2: 0.4}
SMALL_MU = 0.1


@criterion(1, "time sweep reproduces F, op counts and rounded bounds (m=10, lambda0=2)")
def test_time_sweep_truncation_table():
    start = time.perf_counter()
    p = SystemParams.from_rates(2.0, 1.0, 10)
    bad = []
    for t, ub, F, phi, theta in EXPERIMENT_A:
        r = choose_truncation(p, t, 1e-3)
        if (r.F, r.phi, r.theta) != (F, phi, theta):
            bad.append(f"t={t}: got {(r.F, r.phi, r.theta)}, printed {(F, phi, theta)}")
        if round_half_up(r.error_bound, 4) != ub:
            bad.append(f"t={t}: bound {r.error_bound:.6g} does not round to {ub}")
    elapsed = time.perf_counter() - start
    assert [row[2] for row in EXPERIMENT_A] == [11, 18, 31, 44, 57, 70, 83, 96, 109, 122, 135, 148, 161]
    assert not bad, "\n".join(bad)
    assert elapsed < 1.0


@criterion(2, "load sweeps reproduce F and op counts for all 32 rows (m=10 and m=20, t=0.1)")
def test_load_sweep_truncation_tables():
    start = time.perf_counter()
    bad = []
    for m, table in ((10, EXPERIMENT_B), (20, EXPERIMENT_C)):
        for lam, _ub, F, phi, theta in table:
            r = choose_truncation(SystemParams.from_rates(lam, 1.0, m), 0.1, 1e-3)
            if (r.F, r.phi, r.theta) != (F, phi, theta):
                bad.append(f"m={m} lambda0={lam}: got {(r.F, r.phi, r.theta)}, printed {(F, phi, theta)}")
    elapsed = time.perf_counter() - start
    assert len(EXPERIMENT_B) + len(EXPERIMENT_C) == 32
    assert not bad, "\n".join(bad)
    assert elapsed < 1.0


@criterion(3, "one-server closed form and 10-term series match printed values to 1e-6 (cases 2, 3)")
@pytest.mark.parametrize("case, table", [(2, EXPERIMENT_D_CASE2), (3, EXPERIMENT_D_CASE3)])
def test_one_server_table(case, table):
    p = SystemParams.from_rates(ONE_SERVER[case], SMALL_MU, 1)
    bad = []
    for t, i, j, ex, ap in table:
        got_ex = exact_m1(p, t)[i, j]
        got_ap = truncated_expm(p, t, 10)[i, j]
        if abs(got_ex - ex) > 1e-6:
            bad.append(f"t={t} P{i}{j} exact: {got_ex:.6f} vs printed {ex}")
        if abs(got_ap - ap) > 1e-6:
            bad.append(f"t={t} P{i}{j} approximate: {got_ap:.6f} vs printed {ap}")
    assert not bad, "\n".join(bad)


def _two_server_mismatches(source, column, tol):
    bad = []
    for case, table in ((1, EXPERIMENT_E_CASE1), (2, EXPERIMENT_E_CASE2)):
        p = SystemParams.from_rates(TWO_SERVER[case], SMALL_MU, 2)
        for t, i, j, ex, ap in table:
            printed = ex if column == "exact" else ap
            got = source(p, t)[i, j]
            if abs(got - printed) > tol:
                bad.append(f"case {case} t={t} P{i}{j}: {got:.6f} vs printed {printed}")
    return bad


@criterion(4, "two-server closed form, oracle and 15-term series against printed values; equilibrium")
def test_two_server_exact_column_closed_form():
    bad = _two_server_mismatches(exact_m2, "exact", 1e-5)
    assert not bad, f"{len(bad)} cells differ:\n" + "\n".join(bad)


@criterion(4, "two-server closed form, oracle and 15-term series against printed values; equilibrium")
def test_two_server_exact_column_oracle():
    bad = _two_server_mismatches(integrate_matrix, "exact", 1e-5)
    assert not bad, f"{len(bad)} cells differ:\n" + "\n".join(bad)


@criterion(4, "two-server closed form, oracle and 15-term series against printed values; equilibrium")
def test_two_server_approximate_column():
    bad = _two_server_mismatches(lambda p, t: truncated_expm(p, t, 15), "approximate", 1e-5)
    assert not bad, f"{len(bad)} cells differ:\n" + "\n".join(bad)


@criterion(4, "two-server closed form, oracle and 15-term series against printed values; equilibrium")
def test_two_server_equilibrium():
    pi = stationary(SystemParams.from_rates(0.4, SMALL_MU, 2))
    np.testing.assert_allclose(pi, [0.076923, 0.307692, 0.615385], atol=1e-6)


@criterion(5, "series deviation from the oracle never exceeds the remainder bound (50 draws, m <= 5)")
def test_bound_soundness(rng):
    cfg = OracleConfig(rel_tol=1e-13, abs_tol=1e-15)
    checked = 0
    while checked < 50:
        m = int(rng.integers(1, 6))
        p = SystemParams.from_rates(rng.uniform(0.05, 5.0), rng.uniform(0.1, 5.0), m)
        t = rng.uniform(0.01, 2.0)
        F0 = math.floor(bound_argument(p, t)) + 1
        F = F0 + int(rng.integers(0, 15))
        bound = error_bound(p, t, F)
        # keep the bound well above the oracle's own error
        if bound < 1e-7:
            continue
        dev = truncated_expm(p, t, F) - integrate_matrix(p, t, cfg)
        sup = np.abs(dev).max()
        norm = matrix_norm(dev.T)
        assert sup <= bound, f"{p}, t={t}, F={F}: sup {sup:.3e} > bound {bound:.3e}"
        assert norm <= bound, f"{p}, t={t}, F={F}: norm {norm:.3e} > bound {bound:.3e}"
        checked += 1


@criterion(6, "closed forms agree with the oracle to 1e-9 and compose as a semigroup to 1e-10")
@pytest.mark.parametrize("m", [1, 2])
def test_cross_method_agreement(m, rng):
    exact = exact_m1 if m == 1 else exact_m2
    worst = 0.0
    for _ in range(20):
        p = SystemParams.from_rates(rng.uniform(0.05, 2.0), rng.uniform(0.1, 2.0), m)
        for t in (0.1, 0.5, 1.0, 2.0, 5.0, 20.0):
            worst = max(worst, np.abs(exact(p, t) - integrate_matrix(p, t)).max())
        s, u = rng.uniform(0, 5, size=2)
        np.testing.assert_allclose(exact(p, s + u), exact(p, s) @ exact(p, u), atol=1e-10, rtol=0)
    assert worst <= 1e-9


@criterion(7, "bulk and small-state expansions equal scaled M|M|inf laws; M|M|inf from one normalises")
def test_algebraic_identities(rng):
    for _ in range(20):
        m = int(rng.integers(20, 300))
        alpha = rng.uniform(0.1, 10.0)
        p = SystemParams(rng.uniform(0.05, 0.95) * m / alpha, alpha, m)
        t = rng.uniform(0.01, 10.0) * p.alpha
        for n in {1, m // 3, m // 2, m - 1}:
            s = stirling_factor(n)
            assert knessl_p0(p, n, t, RegimeTag.R1B) == pytest.approx(s * p0n_inf(p, n, t), rel=1e-12)
            assert knessl_p1(p, n, t, RegimeTag.R2B) == pytest.approx(s * p1n_inf(p, n, t), rel=1e-12)
        for n in (0, 1, 2, 5):
            assert knessl_p0(p, n, t, RegimeTag.R1C) == pytest.approx(p0n_inf(p, n, t), rel=1e-12)
        assert inf_vector(p, t, 1).sum() == pytest.approx(1.0, abs=1e-12)


@criterion(8, "blocking expansions reach the Stirling-form Erlang value, which is within 2/m of Erlang B")
@pytest.mark.parametrize("m, r0", [(30, 15.0), (50, 25.0)])
def test_erlang_limits(m, r0):
    p = SystemParams(r0, 1.0, m)
    target = math.exp(m * (1 - math.log(m)) + m * math.log(r0) - r0) / math.sqrt(2 * math.pi * m)
    assert blocking_limit(p) == pytest.approx(target, rel=1e-12)
    for n0 in (0, 1):
        assert blocking_probability(p, n0, 100 * p.alpha) == pytest.approx(target, rel=1e-6)
    assert abs(target / erlang_b(p) - 1) <= 2 / m


@criterion(9, "bulk and blocking errors against the oracle shrink as m doubles (rho=0.5, t=alpha)")
def test_asymptotic_convergence():
    start = time.perf_counter()
    cfg = OracleConfig(rel_tol=1e-10, abs_tol=1e-30)
    bulk, block = [], []
    for m in (20, 40, 80):
        p = SystemParams(0.5 * m, 1.0, m)
        ref = integrate(p, 0, p.alpha, cfg).probabilities
        n = m // 2
        bulk.append(abs(knessl_p0(p, n, p.alpha, RegimeTag.R1B) / ref[n] - 1))
        block.append(abs(blocking_probability(p, 0, p.alpha) / ref[m] - 1))
    assert bulk[0] > bulk[1] > bulk[2], bulk
    assert block[0] > block[1] > block[2], block
    assert time.perf_counter() - start < 120
