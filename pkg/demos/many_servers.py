"""
Large-m approximations
======================

With many servers the loss system looks like an infinite-server queue
rescaled by a Stirling factor. This script measures how good that is.
"""

import mmmm
from mmmm.asymptotics import RegimeTag

# Half-loaded systems of growing size, observed after one service time.
for m in (20, 40, 80, 160):
    params = mmmm.SystemParams(lambda0=m / 2, alpha=1.0, m=m)
    ref = mmmm.integrate(params, 0, 1.0, mmmm.OracleConfig(abs_tol=1e-30)).probabilities
    n = m // 2
    bulk = mmmm.knessl_p0(params, n, 1.0, RegimeTag.R1B)
    block = mmmm.blocking_probability(params, 0, 1.0)
    print(
        f"m={m:<4} bulk rel err={abs(bulk / ref[n] - 1):.2e} "
        f"blocking rel err={abs(block / ref[m] - 1):.2e}"
    )

# The regime is picked from (n, t); the M|M|inf shortcut reports the factor
# it applied.
params = mmmm.SystemParams(lambda0=50.0, alpha=1.0, m=100)
for n, t in ((50, 1.0), (2, 1.0), (100, 1.0), (1, 0.01)):
    tag = mmmm.classify_regime(params, n, t, 0)
    print(f"n={n:<3} t={t:<5} regime={tag.value}")

value, factor = mmmm.approx_mmm_via_inf(params, 50, 1.0, 0)
print(f"P[N=50] ~ {value:.6e} (factor {factor:.6f} on the M|M|inf value)")

# Long-run blocking: the expansion tends to a Stirling-form Erlang B.
print("expansion limit", mmmm.blocking_limit(params), "Erlang B", mmmm.erlang_b(params))
