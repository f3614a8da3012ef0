"""
Choosing a Taylor truncation order
==================================

How many series terms does ``expm(tA)`` need before the a-priori remainder
bound drops below a tolerance, and what does that cost?
"""

import numpy as np

import mmmm

# Ten servers, unit service rate, two arrivals per unit time.
params = mmmm.SystemParams.from_rates(lambda0=2.0, mu=1.0, m=10)

# The required order grows roughly linearly with the time horizon.
for t in (0.1, 0.5, 1.0, 2.0):
    r = mmmm.choose_truncation(params, t, tol=1e-3)
    print(f"t={t:<4} F={r.F:<4} bound={r.error_bound:.2e} mults={r.phi} adds={r.theta}")

# The bound is honest: compare the series against the ODE reference.
t = 1.0
r = mmmm.choose_truncation(params, t, tol=1e-6)
series = mmmm.truncated_expm(params, t, r.F)
reference = mmmm.integrate_matrix(params, t)
print("observed deviation", np.abs(series - reference).max(), "<= bound", r.error_bound)

# Below floor(z) + 1 terms there is no bound at all, and the partial sum can
# even go negative. ``clamp=True`` hides the sign but not the error.
import warnings

with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    rough = mmmm.truncated_expm(params, 3.0, 5)
print("warning:", caught[0].message)
print("smallest entry of a 5-term sum at t=3:", rough.min())
