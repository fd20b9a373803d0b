"""Random problem generators shared by the test modules."""

import numpy as np

from vbmm import dirichlet


def random_alpha(rng, d, total_range=(1.0, 100.0)):
    """Positive vector whose sum is log-uniform in ``total_range`` (floored at
    0.1 d so no component is vanishingly small)."""
    lo = max(total_range[0], 0.1 * d)
    total = np.exp(rng.uniform(np.log(lo), np.log(max(lo, total_range[1]))))
    w = rng.uniform(0.5, 1.5, d)
    return total * w / w.sum()


def random_data(rng, d, n_samples, total_range=(1.0, 100.0)):
    alpha = random_alpha(rng, d, total_range)
    return dirichlet.sample(alpha, n_samples, int(rng.integers(2**31))), alpha


def random_point(rng, d, low=1e-2, high=20.0):
    """Point with log-uniform coordinates in ``[low, high]``."""
    return np.exp(rng.uniform(np.log(low), np.log(high), d))
