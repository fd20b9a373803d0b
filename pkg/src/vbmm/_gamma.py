"""Gamma(shape, 1) variates by Marsaglia and Tsang's squeeze method.

Variates are returned on the log scale so that shapes far below one, whose
draws routinely underflow double precision, stay representable.
"""

import numpy as np


def _log_gamma_ge1(shape, rng):
    """log of Gamma(shape) draws for shape >= 1, one per entry of ``shape``."""
    d = shape - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)
    out = np.empty_like(shape)
    todo = np.arange(shape.size)
    while todo.size:
        dd, cc = d[todo], c[todo]
        x = rng.standard_normal(todo.size)
        v = 1.0 + cc * x
        ok = v > 0.0
        v = np.where(ok, v, 1.0) ** 3
        u = rng.random(todo.size)
        x2 = x * x
        # squeeze test first, full log test only when it is inconclusive
        accept = ok & ((u < 1.0 - 0.0331 * x2 * x2)
                       | (np.log(u) < 0.5 * x2 + dd * (1.0 - v + np.log(v))))
        out[todo[accept]] = np.log(dd[accept]) + np.log(v[accept])
        todo = todo[~accept]
    return out


def log_gamma_variates(shape, rng):
    """Draw ``log G_i`` with ``G_i ~ Gamma(shape_i, 1)`` independently.

    Shapes below one are boosted: ``G(a) = G(a + 1) * U^(1/a)``.
    """
    shape = np.asarray(shape, dtype=float)
    if np.any(shape <= 0.0) or not np.all(np.isfinite(shape)):
        raise ValueError("gamma shape must be finite and positive")
    flat = shape.ravel()
    small = flat < 1.0
    boosted = np.where(small, flat + 1.0, flat)
    logg = _log_gamma_ge1(boosted, rng)
    if small.any():
        u = rng.random(int(small.sum()))
        logg[small] += np.log(u) / flat[small]
    return logg.reshape(shape.shape)
