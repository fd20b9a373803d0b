"""Reference solvers for the Dirichlet NLL: a positivity-safeguarded Newton
method and the fixed-point (Minka) iteration."""

import time
from dataclasses import dataclass

import numpy as np

from .bregman import ConvergenceTrace, SolverConfig, Status, guard_slack
from .dirichlet import _warn_if_degenerate, check_params, nll, nll_gradient
from .specfun import digamma, inv_digamma, trigamma

__all__ = ["NewtonConfig", "newton_direction", "newton_dirichlet", "minka_fixed_point",
           "minka_update"]


@dataclass(frozen=True)
class NewtonConfig:
    max_iterations: int = 500
    gradient_norm_tolerance: float = 1e-10
    max_step_halvings: int = 60
    keep_iterates: bool = False

    def __post_init__(self):
        if not self.gradient_norm_tolerance > 0.0:
            raise ValueError("gradient_norm_tolerance must be positive")
        if self.max_iterations < 1 or self.max_step_halvings < 1:
            raise ValueError("iteration budgets must be positive")


def newton_direction(alpha, grad, n_samples):
    """Solve ``H p = -grad`` for ``H = M diag(psi'(alpha)) - M psi'(sum alpha) 11^T``.

    Sherman-Morrison on the diagonal-plus-rank-one Hessian, O(d).
    Returns ``(p, positive_definite)``; when the rank-one update would make
    ``H`` indefinite the diagonally scaled gradient step is returned instead.
    """
    diag = n_samples * trigamma(alpha)
    rank1 = -n_samples * trigamma(alpha.sum())
    u = grad / diag
    denom = 1.0 + rank1 * np.sum(1.0 / diag)
    if not denom > 0.0:
        return -u, False
    p = -(u - (rank1 * u.sum() / denom) / diag)
    return p, True


def newton_dirichlet(data, x0=None, cfg=NewtonConfig(), reference=None):
    """Newton's method on the NLL, step halved until the iterate stays positive
    and the objective does not increase.

    Stops when the gradient norm reaches ``cfg.gradient_norm_tolerance`` or when
    the Newton step falls below floating-point resolution of the iterate.
    """
    _warn_if_degenerate(data)
    x = np.full(data.dim, 10.0) if x0 is None else check_params(x0).copy()
    trace = ConvergenceTrace()
    value = nll(x, data)
    elapsed = 0.0
    trace.record(0, value, elapsed, x, reference, cfg.keep_iterates)

    for k in range(1, cfg.max_iterations + 1):
        tic = time.perf_counter()
        grad = nll_gradient(x, data)
        if np.linalg.norm(grad) <= cfg.gradient_norm_tolerance:
            trace.status = Status.CONVERGED
            return x, trace
        p, _ = newton_direction(x, grad, data.n_samples)
        if np.linalg.norm(p) <= 4.0 * np.finfo(float).eps * np.linalg.norm(x):
            trace.status = Status.CONVERGED
            return x, trace

        step = 1.0
        for _ in range(cfg.max_step_halvings):
            cand = x + step * p
            if np.all(cand > 0.0):
                cand_value = nll(cand, data)
                if cand_value <= value + 1e-12 * (1.0 + abs(value)):
                    break
            step *= 0.5
        else:
            trace.status = Status.STALLED
            return x, trace
        elapsed += time.perf_counter() - tic

        x, value = cand, cand_value
        trace.record(k, value, elapsed, x, reference, cfg.keep_iterates)

    if np.linalg.norm(nll_gradient(x, data)) <= cfg.gradient_norm_tolerance:
        trace.status = Status.CONVERGED
    else:
        trace.status = Status.MAX_ITERATIONS
    return x, trace


def minka_update(alpha, data):
    """``alpha_i <- inv_digamma(psi(sum alpha) + mean_m ln z_{m,i})``."""
    alpha = check_params(alpha)
    return inv_digamma(digamma(alpha.sum()) + data.log_geo_mean)


def minka_fixed_point(data, x0=None, cfg=SolverConfig(), reference=None):
    """Fixed-point iteration of the likelihood equations; a majorization-
    minimization scheme, so the objective is non-increasing."""
    _warn_if_degenerate(data)
    x = np.full(data.dim, 10.0) if x0 is None else check_params(x0).copy()
    trace = ConvergenceTrace()
    value = nll(x, data)
    elapsed = 0.0
    trace.record(0, value, elapsed, x, reference, cfg.keep_iterates)

    for k in range(1, cfg.max_iterations + 1):
        tic = time.perf_counter()
        x_new = minka_update(x, data)
        elapsed += time.perf_counter() - tic
        new_value = nll(x_new, data)
        if cfg.monotonicity_guard and not new_value <= value + guard_slack(value):
            trace.status = Status.GUARD_VIOLATION
            return x, trace
        change = np.linalg.norm(x_new - x) / max(np.linalg.norm(x), 1.0)
        x, value = x_new, new_value
        trace.record(k, value, elapsed, x, reference, cfg.keep_iterates)
        if change < cfg.rel_change_tolerance:
            trace.status = Status.CONVERGED
            return x, trace

    trace.status = Status.MAX_ITERATIONS
    return x, trace
