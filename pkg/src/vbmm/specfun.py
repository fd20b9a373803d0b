"""Real special functions on (0, inf): log-gamma, digamma, trigamma and the
inverse of digamma.

All functions accept scalars or numpy arrays and return the same kind.
Arguments must be finite and strictly positive.

Accuracy strategy
-----------------
* large arguments use the Stirling / de Moivre asymptotic series,
* small arguments are moved into the asymptotic range with the unit-step
  recurrences,
* neighbourhoods of zeros (``ln_gamma`` at 1 and 2, ``digamma`` at its
  positive root) use Taylor series whose coefficients are zeta values, so the
  result keeps full relative precision where it crosses zero.
"""

from fractions import Fraction
from math import factorial

import numpy as np

__all__ = [
    "DomainError",
    "ConvergenceError",
    "EULER_GAMMA",
    "ln_gamma",
    "digamma",
    "trigamma",
    "inv_digamma",
    "ln_gamma1p",
    "digamma1p",
    "zeta",
    "hurwitz_zeta",
]

EULER_GAMMA = 0.57721566490153286060651209008240243
HALF_LOG_2PI = 0.91893853320467274178032973640561764

# positive root of digamma, split into a double-double pair
_DIGAMMA_ROOT_HI = 1.4616321449683622
_DIGAMMA_ROOT_LO = 9.549995429965697e-17

# B_2, B_4, ..., B_20
_BERNOULLI = [
    Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30),
    Fraction(5, 66), Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510),
    Fraction(43867, 798), Fraction(-174611, 330),
]

_ASYMPTOTIC_START = 12.0


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


class ConvergenceError(ArithmeticError):
    """An inner iteration failed to reach its accuracy target."""


def _check_positive(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise DomainError("argument must be finite and strictly positive")
    return arr


def _wrap(result, like):
    if np.ndim(like) == 0:
        return float(result)
    return result


def hurwitz_zeta(s, a, terms=16):
    """Hurwitz zeta ``sum_{n>=0} (a + n)^-s`` for real ``s > 1`` and ``a > 0``.

    Euler-Maclaurin summation with ``terms`` explicit terms. Intended for the
    handful of constants needed at import time, not for vectorized use.
    """
    if s <= 1.0 or a <= 0.0:
        raise DomainError("hurwitz_zeta requires s > 1 and a > 0")
    head = 0.0
    for n in range(terms - 1, -1, -1):
        head += (a + n) ** (-s)
    big = a + terms
    tail = big ** (1.0 - s) / (s - 1.0) + 0.5 * big ** (-s)
    rising = s  # s (s+1) ... (s+2j-2)
    for j, b2j in enumerate(_BERNOULLI, start=1):
        tail += float(b2j) / factorial(2 * j) * rising * big ** (-s - 2 * j + 1)
        rising *= (s + 2 * j - 1) * (s + 2 * j)
    return head + tail


def zeta(s):
    """Riemann zeta for real ``s > 1``."""
    return hurwitz_zeta(s, 1.0)


def _zeta_minus_one(s):
    return hurwitz_zeta(s, 2.0)


# ln Gamma(1 + z) = -gamma z + (z - log1p z) + sum_{k>=2} (-1)^k (zeta(k) - 1) z^k / k
# terms decay like (|z|/2)^k; 26 of them cover |z| <= 0.5
_LNGAMMA_TERMS = 26
_LNGAMMA_COEF = np.array(
    [(-1) ** k * _zeta_minus_one(k) / k for k in range(2, _LNGAMMA_TERMS + 2)]
)

# digamma(x0 + z) = sum_{k>=1} (-1)^(k+1) zeta(k+1, x0) z^k, terms decay like (|z|/x0)^k
_ROOT_TERMS = 24
_ROOT_RADIUS = 0.25
_DIGAMMA_ROOT_COEF = np.array(
    [(-1) ** (k + 1) * hurwitz_zeta(k + 1, _DIGAMMA_ROOT_HI + _DIGAMMA_ROOT_LO)
     for k in range(1, _ROOT_TERMS + 1)]
)

_STIRLING_LN = np.array(
    [float(b / (2 * k * (2 * k - 1))) for k, b in enumerate(_BERNOULLI[:8], start=1)]
)
_STIRLING_PSI = np.array(
    [float(b / (2 * k)) for k, b in enumerate(_BERNOULLI[:8], start=1)]
)
_STIRLING_TRI = np.array([float(b) for b in _BERNOULLI[:8]])

_SHIFTS = np.arange(int(_ASYMPTOTIC_START) + 1, dtype=float)


def _horner(coef, z):
    """Evaluate ``sum_k coef[k] z^k``; one power table beats a Python Horner
    loop for the short arrays the solvers pass in."""
    return np.power.outer(z, np.arange(coef.size)) @ coef


def _lngamma1p_small(z):
    """ln Gamma(1 + z) for |z| <= 0.5."""
    series = _horner(_LNGAMMA_COEF, z) * z * z
    return -EULER_GAMMA * z + (z - np.log1p(z)) + series


_DIGAMMA1P_COEF = _LNGAMMA_COEF * np.arange(2, _LNGAMMA_TERMS + 2)


def ln_gamma1p(t):
    """``ln Gamma(1 + t)`` for ``t >= 0`` without rounding ``1 + t`` first."""
    ta = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(ta)) or np.any(ta < 0.0):
        raise DomainError("ln_gamma1p requires finite t >= 0")
    tf = np.atleast_1d(ta).ravel()
    out = np.empty_like(tf)
    small = tf <= 0.5
    if small.any():
        out[small] = _lngamma1p_small(tf[small])
    if not small.all():
        out[~small] = ln_gamma(1.0 + tf[~small])
    return _wrap(out.reshape(ta.shape), t)


def digamma1p(t):
    """``digamma(1 + t)`` for ``t >= 0`` without rounding ``1 + t`` first."""
    ta = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(ta)) or np.any(ta < 0.0):
        raise DomainError("digamma1p requires finite t >= 0")
    tf = np.atleast_1d(ta).ravel()
    out = np.empty_like(tf)
    small = tf <= 0.5
    if small.any():
        ts = tf[small]
        # -gamma + t/(1+t) + sum_{k>=2} (-1)^k (zeta(k) - 1) t^(k-1)
        out[small] = -EULER_GAMMA + ts / (1.0 + ts) + _horner(_DIGAMMA1P_COEF, ts) * ts
    if not small.all():
        out[~small] = digamma(1.0 + tf[~small])
    return _wrap(out.reshape(ta.shape), t)


def _lngamma_stirling(x):
    inv = 1.0 / x
    corr = _horner(_STIRLING_LN, inv * inv) * inv
    return (x - 0.5) * np.log(x) - x + HALF_LOG_2PI + corr


def _shift_terms(x):
    """Points ``x + k`` for the ``n = ceil(12 - x)`` unit shifts that move
    ``x`` into the asymptotic range, as a masked (len(x), 13) table."""
    n = np.clip(np.ceil(_ASYMPTOTIC_START - x), 0.0, None)
    pts = x[:, None] + _SHIFTS
    return x + n, pts, _SHIFTS < n[:, None]


def ln_gamma(x):
    """Natural logarithm of the gamma function for ``x > 0``."""
    xa = _check_positive(x)
    xf = np.atleast_1d(xa).astype(float).ravel()

    # |x - 1| <= 0.5 or |x - 2| < 0.5: Taylor series keeps the zeros at 1 and 2 exact
    near = (xf >= 0.5) & (xf < 2.5)
    y, pts, mask = _shift_terms(xf)
    prod = np.where(mask, pts, 1.0).prod(axis=1)
    out = _lngamma_stirling(y) - np.log(prod)
    if near.any():
        xn = xf[near]
        two = xn >= 1.5
        z = np.where(two, xn - 2.0, xn - 1.0)
        out[near] = _lngamma1p_small(z) + np.where(two, np.log1p(z), 0.0)

    return _wrap(out.reshape(np.shape(xa)), x)


def _digamma_asymptotic(y):
    inv = 1.0 / y
    inv2 = inv * inv
    return np.log(y) - 0.5 / y - _horner(_STIRLING_PSI, inv2) * inv2


def digamma(x):
    """Digamma function, the derivative of :func:`ln_gamma`."""
    xa = _check_positive(x)
    xf = np.atleast_1d(xa).astype(float).ravel()

    y, pts, mask = _shift_terms(xf)
    out = _digamma_asymptotic(y) - np.where(mask, 1.0 / pts, 0.0).sum(axis=1)
    z = (xf - _DIGAMMA_ROOT_HI) - _DIGAMMA_ROOT_LO
    root = np.abs(z) <= _ROOT_RADIUS
    if root.any():
        zr = z[root]
        out[root] = _horner(_DIGAMMA_ROOT_COEF, zr) * zr

    return _wrap(out.reshape(np.shape(xa)), x)


def trigamma(x):
    """Trigamma function, the second derivative of :func:`ln_gamma`."""
    xa = _check_positive(x)
    xf = np.atleast_1d(xa).astype(float).ravel()
    y, pts, mask = _shift_terms(xf)
    inv = 1.0 / y
    inv2 = inv * inv
    tail = inv + 0.5 * inv2 + _horner(_STIRLING_TRI, inv2) * inv2 * inv
    out = tail + np.where(mask, (1.0 / pts) ** 2, 0.0).sum(axis=1)
    return _wrap(out.reshape(np.shape(xa)), x)


def inv_digamma(y, max_iter=20, tol=1e-11):
    """Solve ``digamma(x) = y`` for ``x > 0``.

    Newton's method started from ``exp(y) + 1/2`` when ``y >= -2.22`` and from
    ``-1/(y + gamma)`` otherwise.

    Parameters
    ----------
    y : float or array_like
        Finite target values.
    max_iter : int
        Newton step budget.
    tol : float
        Accepted residual ``|digamma(x) - y|``, scaled by ``max(1, |y|)``
        because digamma is only representable to a few ulps of ``|y|``.

    Raises
    ------
    ConvergenceError
        If the residual target is not met within ``max_iter`` steps.
    """
    ya = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(ya)):
        raise DomainError("inv_digamma requires finite input")
    yf = np.atleast_1d(ya).ravel()
    with np.errstate(over="ignore", divide="ignore"):
        x = np.where(yf >= -2.22, np.exp(np.minimum(yf, 700.0)) + 0.5,
                     -1.0 / (yf + EULER_GAMMA))
    # exp(y) is already accurate for huge y; Newton would stall on overflow
    x = np.where(yf > 700.0, np.exp(np.minimum(yf, 709.0)), x)
    scale = tol * np.maximum(1.0, np.abs(yf))

    done = np.zeros(yf.shape, dtype=bool)
    for _ in range(max_iter):
        active = ~done
        if not active.any():
            break
        xa_ = x[active]
        resid = digamma(xa_) - yf[active]
        step = resid / trigamma(xa_)
        new = xa_ - step
        # Newton on the concave digamma can overshoot past zero from the right
        new = np.where(new > 0.0, new, 0.5 * xa_)
        x[active] = new
        finished = (np.abs(resid) <= scale[active]) | (
            np.abs(new - xa_) <= 4.0 * np.finfo(float).eps * new)
        done[np.flatnonzero(active)[finished]] = True

    resid = np.abs(digamma(x) - yf)
    if np.any(resid > scale):
        raise ConvergenceError(
            f"inv_digamma did not converge (max residual {resid.max():.3e})")
    return _wrap(x.reshape(np.shape(ya)), y)
