"""
The generic iteration on a problem of your own
==============================================

vbmm_run only needs the smooth part, its gradient, a family of separable
Bregman functions indexed by the anchor, and the exact subproblem solver.
Here: nonnegative least squares with a diagonal metric that changes with the
iterate, h_y(x) = sum_i b_i(y) x_i^2 / 2.
"""

import numpy as np

from vbmm import bregman

rng = np.random.default_rng(3)
A = rng.normal(size=(40, 10))
target = rng.normal(size=40)

# f(x) = ||Ax - target||^2 / 2. For nonnegative y the diagonal weights
# b_i(y) = (A^T A |y|)_i / y_i dominate A^T A (a Lee-Seung style metric);
# floor them by the row sums so they stay valid near zero.
AtA = A.T @ A
row_bound = np.abs(AtA).sum(axis=1)


def family(y):
    b = np.minimum(row_bound, (np.abs(AtA) @ np.maximum(y, 1e-12)) / np.maximum(y, 1e-12))
    return bregman.SeparableBregman(np.zeros_like(y), b, bregman.ZERO, y)


obj = bregman.ObjectiveSpec(
    f=lambda x: 0.5 * float(np.sum((A @ x - target) ** 2)),
    grad_f=lambda x: A.T @ (A @ x - target),
    prox=lambda h, y, g: np.maximum(y - g / h.b, 0.0),
    g=lambda x: 0.0 if np.all(x >= 0.0) else np.inf,
)

x, trace = bregman.vbmm_run(obj, family, np.ones(10),
                            bregman.SolverConfig(rel_change_tolerance=1e-12))
print(trace.status.value, "after", trace.n_iterations, "iterations, F =", trace.objective[-1])
print("x =", np.round(x, 4))

# Projected-gradient fixed-point residual as an optimality check
L = np.linalg.eigvalsh(AtA).max()
print("fixed-point residual:", np.linalg.norm(x - np.maximum(x - obj.grad_f(x) / L, 0.0)))

# The monotonicity guard catches a family that is too flat to majorize f.
flat = bregman.quadratic_family(np.full(10, 0.01 * L))
_, bad = bregman.vbmm_run(obj, flat, np.ones(10))
print("with an invalid metric:", bad.status.value, "at iteration", bad.n_iterations)
