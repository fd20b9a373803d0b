"""
Estimation under a box constraint
=================================

Adding the indicator of a box [lo, hi] only changes the subproblem: its exact
minimizer is the unconstrained update clamped to the box. Newton and the
fixed-point iteration have no such shortcut.
"""

import numpy as np

from vbmm import dirichlet
from vbmm.bregman import SolverConfig

rng = np.random.default_rng(1)
alpha_true = rng.uniform(0.05, 2.0, 30)
data = dirichlet.sample(alpha_true, 100, seed=1)
box = dirichlet.BoxConstraint.uniform(1e-10, 1.0, 30)

alpha, trace = dirichlet.fit_vbmm(data, box=box,
                                  cfg=SolverConfig(rel_change_tolerance=1e-14,
                                                   keep_iterates=True))
print(trace.status.value, "after", trace.n_iterations, "iterations")
print("components at the upper bound:", int(np.sum(alpha >= 1.0)))
print("every iterate feasible:", all(box.contains(x) for x in trace.iterates))
# Near the optimum successive values differ only by rounding, so compare with
# a relative slack of 1e-10.
obj = np.array(trace.objective)
print("objective non-increasing:", bool(np.all(np.diff(obj) <= 1e-10 * (1 + np.abs(obj[:-1])))))

# Optimality: free coordinates have zero gradient, pinned ones push outward.
res = dirichlet.kkt_residual(alpha, data, box)
print("largest KKT residual:", res.max())

# One step by hand
beta = box.project(np.full(30, 0.5))
print("\nboxed step from 0.5:", dirichlet.vbmm_dirichlet_step_boxed(beta, data, box)[:5])
print("free step from 0.5: ", dirichlet.vbmm_dirichlet_step(beta, data)[:5])
