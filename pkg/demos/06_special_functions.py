"""
Log-gamma, digamma and trigamma
===============================

The special functions are evaluated in-house with recurrence shifts, a
Stirling series and Taylor expansions near the awkward points (the zeros of
lnG at 1 and 2, the root of digamma near 1.4616).
"""

import numpy as np

from vbmm import specfun

x = np.array([1e-6, 0.5, 1.0, 1.4616321449683622, 2.0, 10.0, 1e7])
print("x", x)
print("lnG     ", specfun.ln_gamma(x))
print("digamma ", specfun.digamma(x))
print("trigamma", specfun.trigamma(x))

# Newton inversion of digamma powers the fixed-point baseline.
y = np.array([-1e5, -3.0, 0.0, 5.0, 700.0])
x = specfun.inv_digamma(y)
print("\ninv_digamma(y) =", x)
print("round trip error:", np.abs(specfun.digamma(x) - y) / np.maximum(1, np.abs(y)))

# Out-of-domain arguments raise instead of returning nan.
try:
    specfun.ln_gamma(-1.0)
except specfun.DomainError as err:
    print("\nDomainError:", err)
