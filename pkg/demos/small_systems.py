"""
One and two servers in closed form
==================================

For ``m <= 2`` the transition matrix has a closed form. Here it is checked
against the adaptive ODE reference and against a fixed-order series.
"""

import numpy as np

import mmmm

# A single server with mean service time 10 and arrival rate 0.4.
one = mmmm.SystemParams.from_rates(0.4, 0.1, 1)
for t in (0.5, 2.5):
    P = mmmm.exact_m1(one, t)
    print(f"m=1 t={t}: P00={P[0, 0]:.6f}  P11={P[1, 1]:.6f}")

# Two servers: the spectrum is {0, fast, slow} and every entry is a sum of
# three exponentials.
two = mmmm.SystemParams.from_rates(0.4, 0.1, 2)
spec = mmmm.spectral_decompose_m2(two)
print("eigenvalues:", spec.eigenvalues)

for t in (0.5, 1.5, 2.5):
    closed = mmmm.exact_m2(two, t)
    ode = mmmm.integrate_matrix(two, t)
    series = mmmm.truncated_expm(two, t, 15)
    print(
        f"t={t}: |closed-ode|={np.abs(closed - ode).max():.1e} "
        f"|closed-series|={np.abs(closed - series).max():.1e}"
    )

# Long run: every row approaches the stationary law (1, 4, 8) / 13.
print("stationary:", mmmm.stationary(two))
print("row 0 at t=1000:", mmmm.exact_m2(two, 1000.0)[0])
