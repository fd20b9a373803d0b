"""
A small benchmark grid
======================

The harness runs every solver on every (mean family, scale) pair, with
repetition r drawn from seed base_seed + r, and reports RSE traces against a
high-accuracy reference. The same grid is available as `vbmm bench`.
"""

import tempfile
from pathlib import Path

from vbmm import harness

spec = harness.ExperimentSpec(d=20, M=100, repetitions=5, base_seed=0)
table = harness.run_grid(spec, families=("m1", "m3"), scales=(100.0, 1.0))

print("experiment             solver   runs  mean iters  mean iters to 1e-8")
for exp, solver, runs, iters, to_target, reached in harness.iteration_summary(table):
    print(f"{exp:22s} {solver:7s} {runs:5d} {iters:11.1f} {to_target:12.1f} ({reached} hit)")

# The mean-RSE curve carries finished runs forward at their final value.
curve = [r for r in harness.summarize(table) if r[0] == "m1-s100-d20-M100" and r[1] == "vbmm"]
for _, _, k, _, rse in curve[::20]:
    print(f"vbmm, m1-s100, iteration {k:3d}: mean RSE {rse:.2e}")

# Writing to disk gives one trace file per experiment plus summaries.
with tempfile.TemporaryDirectory() as out:
    harness.write_bench(out, spec, ("m1",), (10.0,))
    for path in sorted(Path(out).iterdir()):
        print(path.name, len(path.read_text().splitlines()) - 1, "rows")
