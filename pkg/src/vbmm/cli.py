"""Command line entry point: ``vbmm {synth,estimate,bench,curvature}``."""

import argparse
import os
import sys
from dataclasses import replace

from . import dirichlet, harness
from .dirichlet import BoxConstraint


def _synth(args):
    alpha = harness.build_alpha_true(args.family, harness._parse_scale(args.scale), args.d)
    data = dirichlet.sample(alpha, args.M, args.seed)
    dirichlet.write_samples(args.out, data)


def _trace_path(out):
    stem, ext = os.path.splitext(out)
    return f"{stem}_trace{ext or '.csv'}"


def _estimate(args):
    data = dirichlet.read_samples(args.data)
    box = None
    if args.box is not None:
        if args.solver in harness.UNCONSTRAINED_ONLY:
            raise SystemExit(f"solver {args.solver!r} does not support --box")
        box = BoxConstraint.uniform(args.box[0], args.box[1], data.dim)
    spec = harness.ExperimentSpec(
        d=data.dim, M=data.n_samples, tol=args.tol, max_iter=args.max_iter,
        newton_tol=args.tol, solvers=(args.solver,),
        box_lo=None if box is None else args.box[0],
        box_hi=None if box is None else args.box[1])
    alpha, trace = harness.run_solver(args.solver, data, spec)
    harness.write_csv(args.out, ("index", "alpha"),
                      [(i, float(a)) for i, a in enumerate(alpha)])
    harness.write_csv(_trace_path(args.out), ("iteration", "objective", "elapsed"),
                      zip(trace.iteration, trace.objective, trace.elapsed))
    print(f"{args.solver}: {trace.status.value} after {trace.n_iterations} iterations, "
          f"nll={trace.objective[-1]!r}", file=sys.stderr)


def _bench(args):
    with open(args.spec, encoding="utf-8") as fh:
        spec, families, scales = harness.parse_config(fh.read())
    if args.timing:
        spec = replace(spec, timing=True)
    harness.write_bench(args.out, spec, families, scales, workers=args.workers)


def _curvature(args):
    rows = harness.emit_curvature_table(args.tmin, args.tmax, args.points)
    harness.write_csv(args.out, ("t", "c"), rows)


def build_parser():
    parser = argparse.ArgumentParser(prog="vbmm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="sample a synthetic Dirichlet data set")
    p.add_argument("--family", choices=harness.FAMILIES, default="m1")
    p.add_argument("--scale", default="100", help="number or s1/s2/s3")
    p.add_argument("--d", type=int, default=50)
    p.add_argument("--M", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_synth)

    p = sub.add_parser("estimate", help="fit Dirichlet parameters to a sample CSV")
    p.add_argument("--solver", choices=harness.SOLVERS, default="vbmm")
    p.add_argument("--data", required=True)
    p.add_argument("--box", nargs=2, type=float, metavar=("LO", "HI"))
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=10_000)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_estimate)

    p = sub.add_parser("bench", help="run an experiment grid from a key=value file")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true",
                   help="add wall-clock columns (output is no longer reproducible)")
    p.set_defaults(func=_bench)

    p = sub.add_parser("curvature", help="tabulate the majorant curvature c(t)")
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--tmin", type=float, default=1e-4)
    p.add_argument("--tmax", type=float, default=1e6)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_curvature)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
