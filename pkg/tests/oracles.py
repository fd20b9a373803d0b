"""High-precision reference values for the special functions.

Shift-and-Stirling series evaluated in mpmath multiprecision arithmetic,
with Bernoulli numbers generated from scratch. Nothing here touches the
package or mpmath's own gamma family, so agreement is a genuine check.
"""

from fractions import Fraction
from functools import lru_cache

import mpmath as mp

DPS = 40
SHIFT_TO = 40
N_TERMS = 24


@lru_cache(maxsize=None)
def bernoulli_even(n_terms=N_TERMS):
    """B_2, B_4, ..., B_{2 n_terms} via the Akiyama-Tanigawa algorithm."""
    top = 2 * n_terms
    a = [Fraction(0)] * (top + 1)
    out = {}
    for m in range(top + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        out[m] = a[0]
    return tuple(out[2 * k] for k in range(1, n_terms + 1))


def _shift(x):
    x = mp.mpf(x)
    n = max(0, int(mp.ceil(SHIFT_TO - x)))
    return x, x + n, [x + k for k in range(n)]


def lngamma(x):
    with mp.workdps(DPS):
        x, z, pts = _shift(x)
        s = (z - mp.mpf(1) / 2) * mp.log(z) - z + mp.log(2 * mp.pi) / 2
        for k, b in enumerate(bernoulli_even(), start=1):
            s += mp.mpf(b.numerator) / b.denominator / (2 * k * (2 * k - 1) * z ** (2 * k - 1))
        if pts:
            s -= mp.log(mp.fprod(pts))
        return s


def digamma(x):
    with mp.workdps(DPS):
        x, z, pts = _shift(x)
        s = mp.log(z) - 1 / (2 * z)
        for k, b in enumerate(bernoulli_even(), start=1):
            s -= mp.mpf(b.numerator) / b.denominator / (2 * k * z ** (2 * k))
        return s - mp.fsum(1 / p for p in pts)


def trigamma(x):
    with mp.workdps(DPS):
        x, z, pts = _shift(x)
        s = 1 / z + 1 / (2 * z * z)
        for k, b in enumerate(bernoulli_even(), start=1):
            s += mp.mpf(b.numerator) / b.denominator / z ** (2 * k + 1)
        return s + mp.fsum(1 / (p * p) for p in pts)


def curvature(t):
    """c(t) = 2 (t psi(1 + t) - lnG(1 + t)) / t^2 with 1 + t formed exactly."""
    with mp.workdps(DPS):
        t = mp.mpf(t)
        if t == 0:
            return mp.pi ** 2 / 6
        u = 1 + t
        return 2 * (t * digamma(u) - lngamma(u)) / (t * t)


def boxed_minimizer(f, grad, hess, lower, upper, x0, newton_steps=50):
    """Independent box-constrained minimizer: scipy's L-BFGS-B to identify the
    active set, then dense Newton on the free coordinates with the rest pinned
    to their bounds."""
    import numpy as np
    from scipy.optimize import minimize

    res = minimize(f, x0, jac=grad, method="L-BFGS-B",
                   bounds=list(zip(lower, upper)),
                   options=dict(ftol=0.0, gtol=1e-12, maxiter=20_000, maxfun=40_000))
    x = np.clip(res.x, lower, upper)
    g = grad(x)
    span = upper - lower
    pinned_lo = (x - lower <= 1e-6 * span) & (g > 0.0)
    pinned_hi = (upper - x <= 1e-6 * span) & (g < 0.0)
    x[pinned_lo] = lower[pinned_lo]
    x[pinned_hi] = upper[pinned_hi]
    free = ~(pinned_lo | pinned_hi)
    for _ in range(newton_steps):
        g = grad(x)[free]
        if np.linalg.norm(g) <= 1e-13 * max(1.0, abs(f(x))):
            break
        step = np.linalg.solve(hess(x)[np.ix_(free, free)], -g)
        t = 1.0
        while True:
            cand = x.copy()
            cand[free] += t * step
            if np.all(cand[free] > lower[free]) and np.all(cand[free] < upper[free]):
                break
            t *= 0.5
        x = cand
    return x
