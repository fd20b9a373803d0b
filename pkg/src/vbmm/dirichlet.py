"""Dirichlet maximum-likelihood estimation by Bregman majorization-minimization.

The negative log-likelihood of ``M`` samples ``z_m`` in the open simplex is

    f(alpha) = M * [ sum_i lnG(alpha_i) - lnG(sum_i alpha_i)
                     - sum_i (alpha_i - 1) * mean_m ln z_{m,i} ]

Splitting ``lnG(t) = lnG(t + 1) - ln t`` and bounding ``lnG(. + 1)`` by a
quadratic with curvature :func:`curvature` gives a separable Bregman majorant
(kernel ``-ln``, weights ``M`` and ``M c(beta_i)``) whose minimizer is the
positive root of a quadratic.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from . import bregman
from ._gamma import log_gamma_variates
from .bregman import NEG_LOG, ObjectiveSpec, SeparableBregman, SolverConfig
from .specfun import digamma, digamma1p, ln_gamma, ln_gamma1p, trigamma, zeta

__all__ = [
    "SampleSet",
    "BoxConstraint",
    "DegenerateDataWarning",
    "check_params",
    "log_pdf",
    "nll",
    "nll_gradient",
    "nll_hessian",
    "coercivity_lower_bound",
    "sample",
    "read_samples",
    "write_samples",
    "curvature",
    "CURVATURE_AT_ZERO",
    "bregman_family",
    "fixed_bregman_family",
    "objective",
    "vbmm_dirichlet_step",
    "vbmm_dirichlet_step_boxed",
    "bmm_dirichlet_step",
    "fit_vbmm",
    "fit_bmm",
    "kkt_residual",
]

CURVATURE_AT_ZERO = np.pi ** 2 / 6.0

MIN_COMPONENT = 1e-300


class DegenerateDataWarning(UserWarning):
    """All samples are identical, so the likelihood has no maximizer."""


def check_params(alpha):
    """Validate a Dirichlet parameter vector and return it as a float array."""
    alpha = np.asarray(alpha, dtype=float)
    if alpha.ndim != 1 or alpha.size < 1:
        raise ValueError("alpha must be a nonempty vector")
    if not np.all(np.isfinite(alpha)) or np.any(alpha <= 0.0):
        raise ValueError("alpha must be finite and strictly positive")
    return alpha


@dataclass(frozen=True)
class SampleSet:
    """Samples from the open unit simplex, one per row.

    ``log_geo_mean[i]`` is the mean over samples of ``ln z_{m,i}``, the only
    statistic the likelihood depends on.
    """

    samples: np.ndarray
    log_geo_mean: np.ndarray

    @classmethod
    def from_array(cls, z, renormalize_tol=1e-9):
        """Validate rows of ``z``.

        Rows summing to 1 within ``1e-12`` are kept bit for bit, rows within
        ``renormalize_tol`` are rescaled, anything else is rejected.
        """
        z = np.array(z, dtype=float)
        if z.ndim != 2 or z.shape[0] < 1 or z.shape[1] < 2:
            raise ValueError("samples must be an (M, d) array with d >= 2")
        if not np.all(np.isfinite(z)) or np.any(z <= MIN_COMPONENT):
            raise ValueError(f"sample components must exceed {MIN_COMPONENT:g}")
        gap = np.abs(z.sum(axis=1) - 1.0)
        if np.any(gap > renormalize_tol):
            bad = int(np.argmax(gap))
            raise ValueError(f"row {bad} does not sum to 1 (off by {gap[bad]:.3g})")
        fix = gap > 1e-12
        if fix.any():
            z[fix] /= z[fix].sum(axis=1, keepdims=True)
        if np.any(z >= 1.0):
            raise ValueError("sample components must lie strictly inside (0, 1)")
        z.setflags(write=False)
        lgm = np.log(z).mean(axis=0)
        lgm.setflags(write=False)
        return cls(z, lgm)

    @property
    def n_samples(self):
        return self.samples.shape[0]

    @property
    def dim(self):
        return self.samples.shape[1]

    @property
    def is_degenerate(self):
        """True when all rows are identical."""
        return bool(np.all(self.samples == self.samples[0]))

    def geometric_means(self):
        return np.exp(self.log_geo_mean)


@dataclass(frozen=True)
class BoxConstraint:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        if np.any(lo <= 0.0) or np.any(lo > hi) or np.any(np.isnan(hi)):
            raise ValueError("box bounds must satisfy 0 < lower <= upper")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def uniform(cls, lower, upper, d):
        return cls(np.full(d, float(lower)), np.full(d, float(upper)))

    def project(self, x):
        return np.clip(x, self.lower, self.upper)

    def contains(self, x):
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def indicator(self, x):
        return 0.0 if self.contains(x) else np.inf


def log_pdf(z, alpha):
    """Log density of Dirichlet(alpha) at the rows of ``z``."""
    alpha = check_params(alpha)
    z = np.atleast_2d(np.asarray(z, dtype=float))
    log_norm = np.sum(ln_gamma(alpha)) - ln_gamma(alpha.sum())
    return np.log(z) @ (alpha - 1.0) - log_norm


def nll(alpha, data):
    """Negative log-likelihood of ``data`` under Dirichlet(alpha)."""
    alpha = check_params(alpha)
    lg = ln_gamma(np.append(alpha, alpha.sum()))
    return data.n_samples * (np.sum(lg[:-1]) - lg[-1] - np.dot(alpha - 1.0, data.log_geo_mean))


def nll_gradient(alpha, data):
    alpha = check_params(alpha)
    dg = digamma(np.append(alpha, alpha.sum()))
    return data.n_samples * (dg[:-1] - dg[-1] - data.log_geo_mean)


def nll_hessian(alpha, data):
    """Dense Hessian ``M diag(psi'(alpha)) - M psi'(sum alpha) 11^T``."""
    alpha = check_params(alpha)
    m = data.n_samples
    return m * np.diag(trigamma(alpha)) - m * trigamma(alpha.sum())


def coercivity_lower_bound(alpha, data):
    """Stirling-based lower bound on :func:`nll` that grows with ``sum(alpha)``.

    Strict whenever the samples are not all identical.
    """
    alpha = check_params(alpha)
    d = alpha.size
    total = alpha.sum()
    zt = data.geometric_means()
    inner = (total * (1.0 - zt.sum()) + data.log_geo_mean.sum()
             + 0.5 * (1 - d) * np.log(total) - 1.0 / (12.0 * total)
             + 0.5 * (d - 1) * np.log(2.0 * np.pi))
    return data.n_samples * inner


def sample(alpha_true, n_samples, seed, max_attempts=100):
    """Draw ``n_samples`` Dirichlet vectors as normalized gamma variates.

    Rows with a component at or below ``1e-300`` (or within ``1e-15`` of one)
    are redrawn, at most ``max_attempts`` times per row.
    """
    alpha = check_params(alpha_true)
    if n_samples < 2:
        raise ValueError("need at least two samples")
    rng = np.random.default_rng(seed)
    d = alpha.size
    z = np.empty((n_samples, d))
    todo = np.arange(n_samples)
    for _ in range(max_attempts):
        logg = log_gamma_variates(np.broadcast_to(alpha, (todo.size, d)), rng)
        shift = logg.max(axis=1, keepdims=True)
        w = np.exp(logg - shift)
        rows = w / w.sum(axis=1, keepdims=True)
        ok = np.all(rows > MIN_COMPONENT, axis=1) & np.all(rows < 1.0 - 1e-15, axis=1)
        z[todo[ok]] = rows[ok]
        todo = todo[~ok]
        if not todo.size:
            return SampleSet.from_array(z)
    raise RuntimeError(
        f"{todo.size} rows still outside the open simplex after {max_attempts} "
        "attempts; alpha is too concentrated near zero")


def write_samples(path, data):
    """Write samples as CSV with shortest round-trip float formatting."""
    d = data.dim
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# " + ",".join(f"z{i + 1}" for i in range(d)) + "\n")
        for row in data.samples:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def read_samples(path):
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append([float(v) for v in line.split(",")])
    if len({len(r) for r in rows}) > 1:
        raise ValueError("ragged sample file")
    return SampleSet.from_array(np.array(rows))


# Taylor coefficients of the curvature at 0:
# c(t) = sum_{k>=2} 2 (k-1)/k * (-1)^k zeta(k) t^(k-2)
_CURV_SWITCH = 1e-3
_CURV_TAYLOR = np.array([2.0 * (k - 1) / k * (-1) ** k * zeta(k) for k in range(2, 12)])


def _curvature_direct(t):
    return 2.0 * (t * digamma1p(t) - ln_gamma1p(t)) / (t * t)


def _curvature_taylor(t):
    return np.power.outer(t, np.arange(_CURV_TAYLOR.size)) @ _CURV_TAYLOR


def curvature(t):
    """Curvature of the tightest quadratic majorant of ``lnG(. + 1)`` anchored at t.

    ``c(t) = 2 (lnG(1) - lnG(t + 1) + t psi(t + 1)) / t^2`` with ``c(0) = pi^2/6``.
    Below ``t = 1e-3`` a Taylor expansion replaces the cancelling difference.
    """
    ta = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(ta)) or np.any(ta < 0.0):
        raise ValueError("curvature needs finite t >= 0")
    tf = np.atleast_1d(ta).ravel()
    small = tf < _CURV_SWITCH
    out = _curvature_direct(np.maximum(tf, _CURV_SWITCH))
    if small.any():
        out[small] = _curvature_taylor(tf[small])
    if np.ndim(t) == 0:
        return float(out[0])
    return out.reshape(ta.shape)


def bregman_family(data):
    """Anchor -> Bregman function with weights ``a_i = M``, ``b_i = M c(beta_i)``."""
    m = float(data.n_samples)

    def family(beta):
        beta = np.asarray(beta, dtype=float)
        return SeparableBregman(np.full(beta.shape, m), m * curvature(beta), NEG_LOG, beta)
    return family


def fixed_bregman_family(data):
    """Anchor-independent variant using ``sup c = pi^2/6`` for every coordinate."""
    m = float(data.n_samples)

    def family(beta):
        beta = np.asarray(beta, dtype=float)
        return SeparableBregman(np.full(beta.shape, m),
                                np.full(beta.shape, m * CURVATURE_AT_ZERO), NEG_LOG, beta)
    return family


def _positive_root(c, delta):
    """Positive root of ``c x^2 + delta x - 1 = 0`` without cancellation."""
    disc = np.sqrt(delta * delta + 4.0 * c)
    return np.where(delta > 0.0, 2.0 / (delta + disc), (disc - delta) / (2.0 * c))


def _neglog_quadratic_prox(box=None):
    """Exact prox for ``h = sum a_i (-ln x_i) + b_i x_i^2/2`` with optional box.

    Stationarity of ``<v, x> + D_h(x, y)`` reads
    ``b x^2 + (v + a/y - b y) x - a = 0``; the box case clamps the root since
    the scalar problem is convex.
    """
    def prox(h, y, grad):
        c = h.b / h.a
        delta = (grad + h.a / y - h.b * y) / h.a
        x = _positive_root(c, delta)
        if box is not None:
            x = box.project(x)
        return x
    return prox


def objective(data, box=None):
    """:class:`ObjectiveSpec` for the NLL, optionally with a box indicator."""
    return ObjectiveSpec(
        f=lambda a: nll(a, data),
        grad_f=lambda a: nll_gradient(a, data),
        prox=_neglog_quadratic_prox(box),
        g=(lambda x: 0.0) if box is None else box.indicator,
        in_domain=lambda x: bool(np.all(np.isfinite(x)) and np.all(x > 0.0)),
    )


def _delta(beta, c, data):
    return digamma(beta + 1.0) - digamma(beta.sum()) - c * beta - data.log_geo_mean


def vbmm_dirichlet_step(beta, data):
    """One variable-metric update from ``beta`` (closed form, coordinatewise)."""
    beta = check_params(beta)
    c = curvature(beta)
    return _positive_root(c, _delta(beta, c, data))


def bmm_dirichlet_step(beta, data):
    """Same update with the curvature frozen at its supremum ``pi^2/6``."""
    beta = check_params(beta)
    c = np.full(beta.shape, CURVATURE_AT_ZERO)
    return _positive_root(c, _delta(beta, c, data))


def vbmm_dirichlet_step_boxed(beta, data, box):
    """Variable-metric update followed by projection onto ``box``."""
    beta = check_params(beta)
    if not box.contains(beta):
        raise ValueError("beta must lie inside the box")
    return box.project(vbmm_dirichlet_step(beta, data))


def _warn_if_degenerate(data):
    if data.is_degenerate:
        warnings.warn("all samples are identical; the likelihood has no maximizer",
                      DegenerateDataWarning, stacklevel=3)


def fit_vbmm(data, x0=None, cfg=SolverConfig(), box=None, reference=None):
    """Run variable-metric BMM on the Dirichlet NLL.

    ``x0`` defaults to ``10 * ones(d)`` (projected onto ``box`` if given).
    Returns ``(alpha, trace)``.
    """
    _warn_if_degenerate(data)
    x0 = np.full(data.dim, 10.0) if x0 is None else check_params(x0)
    if box is not None:
        x0 = box.project(x0)
    return bregman.vbmm_run(objective(data, box), bregman_family(data), x0, cfg, reference)


def fit_bmm(data, x0=None, cfg=SolverConfig(), box=None, reference=None):
    """Fixed-metric counterpart of :func:`fit_vbmm`."""
    _warn_if_degenerate(data)
    x0 = np.full(data.dim, 10.0) if x0 is None else check_params(x0)
    if box is not None:
        x0 = box.project(x0)
    return bregman.vbmm_run(objective(data, box), fixed_bregman_family(data), x0, cfg,
                            reference)


def kkt_residual(alpha, data, box):
    """Per-component stationarity residual for the box-constrained NLL.

    Interior components report ``|grad_i| / M``; components on a bound report
    only the part of the scaled gradient pointing out of the feasible set.
    """
    alpha = check_params(alpha)
    g = nll_gradient(alpha, data) / data.n_samples
    at_lo = alpha <= box.lower
    at_hi = alpha >= box.upper
    res = np.abs(g)
    res = np.where(at_lo, np.maximum(-g, 0.0), res)
    res = np.where(at_hi, np.maximum(g, 0.0), res)
    return res
