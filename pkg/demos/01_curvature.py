"""
The curvature of the log-gamma majorant
=======================================

The variable metric used for Dirichlet estimation hinges on one scalar
function, c(t): the smallest curvature of a quadratic that sits above
lnG(x + 1) and touches it at x = t. It starts at pi^2/6 and decays like 2/t.
"""

import numpy as np

from vbmm import dirichlet, harness
from vbmm.specfun import digamma, ln_gamma, trigamma

# A handful of values. At t = 0 the curvature equals trigamma(1) = pi^2/6,
# the constant a fixed-metric scheme has to use everywhere.
for t in (0.0, 1e-3, 0.1, 1.0, 10.0, 100.0, 1e4, 1e6):
    print(f"c({t:g}) = {dirichlet.curvature(t):.12g}   2/t = {2 / t if t else np.inf:.3g}")

# The majorant property itself, on a slice through t = 3
t = 3.0
x = np.linspace(0.01, 30.0, 7)
phi = ln_gamma(x + 1.0)
quad = ln_gamma(t + 1.0) + digamma(t + 1.0) * (x - t) + dirichlet.curvature(t) * (x - t) ** 2 / 2
print("\n    x      lnG(x+1)     majorant")
for xi, a, b in zip(x, phi, quad):
    print(f"{xi:6.2f} {a:12.5f} {b:12.5f}")

# c(t) is not bounded below by the local curvature trigamma(t + 1); it is the
# chord-type quantity that works for every x >= 0 at once.
t = np.array([0.5, 5.0, 50.0])
print("\ntrigamma(t+1):", trigamma(t + 1.0))
print("c(t):         ", dirichlet.curvature(t))

# The CLI writes the same table: `vbmm curvature --points 200 --out c.csv`
rows = harness.emit_curvature_table(1e-4, 1e6, 5)
print("\n", rows)
