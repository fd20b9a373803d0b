"""
Fitting a Dirichlet distribution four ways
==========================================

Draw samples from a known Dirichlet, then recover the maximum-likelihood
parameters with the variable-metric scheme, its fixed-metric ablation,
Newton's method and the classical fixed-point iteration.
"""

import numpy as np

import vbmm
from vbmm import harness

# Family m2 puts ten times more mass on the first coordinate.
alpha_true = harness.build_alpha_true("m2", 10.0, 20)
data = vbmm.sample(alpha_true, n_samples=100, seed=0)
print(f"{data.n_samples} samples in dimension {data.dim}")

# Every solver starts from 10 * ones(d) unless told otherwise.
ref = harness.reference_optimum(data)
runs = {
    "vbmm": vbmm.fit_vbmm(data, reference=ref),
    "bmm": vbmm.fit_bmm(data, reference=ref),
    "newton": vbmm.newton_dirichlet(data, reference=ref),
    "fixed-point": vbmm.minka_fixed_point(data, reference=ref),
}

print("\nsolver       status      iters  iters to RSE<=1e-8   nll")
for name, (alpha, trace) in runs.items():
    print(f"{name:12s} {trace.status.value:11s} {trace.n_iterations:5d} "
          f"{trace.iterations_to(1e-8)!s:>18s}   {trace.objective[-1]:.10f}")

# They all land on the same point, which differs from alpha_true because the
# sample is finite.
alpha = runs["vbmm"][0]
print("\nmax relative gap to Newton:",
      np.max(np.abs(alpha - runs["newton"][0]) / runs["newton"][0]))
print("relative error to alpha_true:",
      np.linalg.norm(alpha - alpha_true) / np.linalg.norm(alpha_true))

# A few steps of the RSE trace show the monotone approach to the optimum.
trace = runs["vbmm"][1]
for k in (0, 1, 5, 20, 50, trace.n_iterations):
    print(f"iteration {k:4d}: RSE = {trace.rse[k]:.3e}")
