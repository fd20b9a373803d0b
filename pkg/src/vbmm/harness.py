"""Synthetic Dirichlet experiments: data grid, solver roster, RSE traces.

Outputs are plain CSV. Unless timing is requested every file is a
deterministic function of the :class:`ExperimentSpec`.
"""

import hashlib
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import baselines, dirichlet
from .bregman import SolverConfig, Status
from .dirichlet import BoxConstraint

__all__ = [
    "FAMILIES",
    "SOLVERS",
    "ExperimentSpec",
    "TraceTable",
    "build_alpha_true",
    "reference_optimum",
    "run_solver",
    "run_experiment",
    "run_grid",
    "summarize",
    "time_summary",
    "iteration_summary",
    "emit_curvature_table",
    "parse_config",
    "write_csv",
]

FAMILIES = ("m1", "m2", "m3")
SCALES = {"s1": 100.0, "s2": 10.0, "s3": 1.0}
SOLVERS = ("vbmm", "bmm", "newton", "minka")
UNCONSTRAINED_ONLY = ("newton", "minka")


@dataclass(frozen=True)
class ExperimentSpec:
    family: str = "m1"
    scale: float = 100.0
    d: int = 50
    M: int = 100
    repetitions: int = 20
    base_seed: int = 0
    solvers: tuple = SOLVERS
    tol: float = 1e-10
    max_iter: int = 10_000
    newton_tol: float = 1e-10
    box_lo: float = None
    box_hi: float = None
    target_rse: float = 1e-8
    timing: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}")
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        if self.d < 2 or self.M < 2:
            raise ValueError("need d >= 2 and M >= 2")
        if self.repetitions < 1:
            raise ValueError("repetitions must be positive")
        unknown = set(self.solvers) - set(SOLVERS)
        if unknown:
            raise ValueError(f"unknown solvers {sorted(unknown)}")
        if (self.box_lo is None) != (self.box_hi is None):
            raise ValueError("box needs both box_lo and box_hi")
        if self.box is not None:
            bad = [s for s in self.solvers if s in UNCONSTRAINED_ONLY]
            if bad:
                raise ValueError(f"{bad} cannot handle box constraints")

    @property
    def box(self):
        if self.box_lo is None:
            return None
        return BoxConstraint.uniform(self.box_lo, self.box_hi, self.d)

    @property
    def experiment_id(self):
        tag = f"{self.family}-s{self.scale:g}-d{self.d}-M{self.M}"
        if self.box is not None:
            tag += f"-box{self.box_lo:g}_{self.box_hi:g}"
        return tag


def build_alpha_true(family, scale, d):
    """``scale * m / sum(m)`` for the mean-vector families

    * ``m1``: all ones,
    * ``m2``: 10 in the first coordinate, ones elsewhere,
    * ``m3``: ``m_i = i``.
    """
    if family == "m1":
        m = np.ones(d)
    elif family == "m2":
        m = np.ones(d)
        m[0] = 10.0
    elif family == "m3":
        m = np.arange(1, d + 1, dtype=float)
    else:
        raise ValueError(f"unknown family {family!r}")
    return scale * m / m.sum()


_REFERENCE_CACHE = {}


def _data_key(data, box):
    h = hashlib.sha1(np.ascontiguousarray(data.samples).tobytes())
    if box is not None:
        h.update(box.lower.tobytes())
        h.update(box.upper.tobytes())
    return h.hexdigest()


def reference_optimum(data, box=None):
    """High-accuracy maximum-likelihood estimate used as the RSE reference.

    Unconstrained: Newton to gradient norm ``1e-13`` (or its rounding floor),
    falling back to 1e5 VBMM iterations. Boxed: 1e5 projected VBMM iterations.
    Results are cached per dataset.
    """
    if data.is_degenerate:
        raise ValueError("identical samples: the likelihood has no maximizer")
    key = _data_key(data, box)
    if key in _REFERENCE_CACHE:
        return _REFERENCE_CACHE[key].copy()
    long_run = SolverConfig(max_iterations=100_000, rel_change_tolerance=1e-15,
                            monotonicity_guard=False)
    if box is None:
        x, trace = baselines.newton_dirichlet(
            data, cfg=baselines.NewtonConfig(max_iterations=1000,
                                             gradient_norm_tolerance=1e-13))
        if trace.status != Status.CONVERGED:
            x, _ = dirichlet.fit_vbmm(data, cfg=long_run)
    else:
        x, _ = dirichlet.fit_vbmm(data, cfg=long_run, box=box)
    _REFERENCE_CACHE[key] = x.copy()
    return x


def run_solver(name, data, spec, reference=None):
    """Run one roster solver from ``10 * ones(d)``; returns ``(alpha, trace)``."""
    x0 = np.full(data.dim, 10.0)
    cfg = SolverConfig(max_iterations=spec.max_iter, rel_change_tolerance=spec.tol)
    if name == "vbmm":
        return dirichlet.fit_vbmm(data, x0, cfg, box=spec.box, reference=reference)
    if name == "bmm":
        return dirichlet.fit_bmm(data, x0, cfg, box=spec.box, reference=reference)
    if name == "newton":
        ncfg = baselines.NewtonConfig(max_iterations=spec.max_iter,
                                      gradient_norm_tolerance=spec.newton_tol)
        return baselines.newton_dirichlet(data, x0, ncfg, reference=reference)
    if name == "minka":
        return baselines.minka_fixed_point(data, x0, cfg, reference=reference)
    raise ValueError(f"unknown solver {name!r}")


@dataclass
class TraceTable:
    """Long-format per-iteration records plus one summary row per run."""

    rows: list = field(default_factory=list)
    runs: list = field(default_factory=list)
    timing: bool = False

    TRACE_COLUMNS = ("experiment", "solver", "repetition", "iteration", "objective", "rse")
    RUN_COLUMNS = ("experiment", "solver", "repetition", "status", "iterations",
                   "iterations_to_target", "final_rse")

    @property
    def columns(self):
        return self.TRACE_COLUMNS + (("elapsed",) if self.timing else ())

    def extend(self, other):
        self.rows.extend(other.rows)
        self.runs.extend(other.runs)

    def select(self, experiment=None, solver=None):
        return [r for r in self.rows
                if (experiment is None or r[0] == experiment)
                and (solver is None or r[1] == solver)]


def _run_repetition(args):
    spec, rep = args
    seed = spec.base_seed + rep
    alpha_true = build_alpha_true(spec.family, spec.scale, spec.d)
    data = dirichlet.sample(alpha_true, spec.M, seed)
    ref = reference_optimum(data, spec.box)
    table = TraceTable(timing=spec.timing)
    exp = spec.experiment_id
    for name in spec.solvers:
        _, trace = run_solver(name, data, spec, reference=ref)
        for k, obj, rse, el in zip(trace.iteration, trace.objective, trace.rse, trace.elapsed):
            row = (exp, name, rep, k, obj, rse)
            table.rows.append(row + ((el,) if spec.timing else ()))
        hit = trace.iterations_to(spec.target_rse)
        table.runs.append((exp, name, rep, trace.status.value, trace.n_iterations,
                           -1 if hit is None else hit, trace.rse[-1]))
    return table


def run_experiment(spec, workers=1):
    """All repetitions of one experiment; repetition ``r`` uses seed ``base_seed + r``."""
    jobs = [(spec, r) for r in range(spec.repetitions)]
    table = TraceTable(timing=spec.timing)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_repetition, jobs))
    else:
        parts = [_run_repetition(j) for j in jobs]
    for part in parts:
        table.extend(part)
    return table


def run_grid(spec, families=None, scales=None, workers=1):
    """Run ``spec`` for every (family, scale) pair; defaults to the family and scale stored on it."""
    table = TraceTable(timing=spec.timing)
    for fam in families or (spec.family,):
        for s in scales or (spec.scale,):
            table.extend(run_experiment(replace(spec, family=fam, scale=float(s)), workers))
    return table


def _group_runs(table):
    groups = {}
    for row in table.rows:
        groups.setdefault((row[0], row[1]), {}).setdefault(row[2], []).append(row)
    return groups


def summarize(table):
    """Mean objective and RSE per iteration, per (experiment, solver).

    Runs that stopped early are carried forward at their final values so
    every iteration index averages over all repetitions.
    """
    out = []
    for (exp, solver), reps in _group_runs(table).items():
        last = max(rows[-1][3] for rows in reps.values())
        rse = np.empty((len(reps), last + 1))
        obj = np.empty_like(rse)
        for j, rows in enumerate(reps.values()):
            its = np.array([r[3] for r in rows])
            idx = np.searchsorted(its, np.arange(last + 1), side="right") - 1
            rse[j] = np.array([r[5] for r in rows])[idx]
            obj[j] = np.array([r[4] for r in rows])[idx]
        for k in range(last + 1):
            out.append((exp, solver, k, float(obj[:, k].mean()), float(rse[:, k].mean())))
    return out


def iteration_summary(table):
    """Per (experiment, solver): run count, mean iterations to termination,
    mean iterations to the RSE target over the runs that reached it, and how
    many runs reached it."""
    groups = {}
    for run in table.runs:
        groups.setdefault((run[0], run[1]), []).append(run)
    out = []
    for (exp, solver), runs in groups.items():
        total = np.array([r[4] for r in runs], dtype=float)
        hits = np.array([r[5] for r in runs if r[5] >= 0], dtype=float)
        out.append((exp, solver, len(runs), float(total.mean()),
                    float(hits.mean()) if hits.size else float("nan"), int(hits.size)))
    return out


def time_summary(table, n_buckets=40):
    """Mean RSE on logarithmic wall-time buckets; requires timing columns."""
    if not table.timing:
        raise ValueError("trace table was recorded without timing")
    out = []
    for (exp, solver), reps in _group_runs(table).items():
        t_max = max(rows[-1][6] for rows in reps.values())
        edges = np.geomspace(1e-5, max(t_max, 2e-5), n_buckets)
        vals = np.empty((len(reps), n_buckets))
        for j, rows in enumerate(reps.values()):
            times = np.array([r[6] for r in rows])
            idx = np.searchsorted(times, edges, side="right") - 1
            vals[j] = np.array([r[5] for r in rows])[np.maximum(idx, 0)]
        for b, edge in enumerate(edges):
            out.append((exp, solver, float(edge), float(vals[:, b].mean())))
    return out


def emit_curvature_table(t_min=1e-4, t_max=1e6, points=200):
    """Rows ``(t, c(t))``: ``t = 0`` followed by ``points`` log-spaced values."""
    if not 0.0 <= t_min < t_max:
        raise ValueError("need 0 <= t_min < t_max")
    start = t_min if t_min > 0.0 else min(1e-6, t_max / 10.0)
    ts = np.concatenate([[0.0], np.geomspace(start, t_max, points)])
    return list(zip(ts.tolist(), dirichlet.curvature(ts).tolist()))


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, header, rows):
    """UTF-8, LF-terminated CSV with shortest round-trip float formatting."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


_INT_KEYS = {"d", "M", "reps", "seed", "max_iter"}
_FLOAT_KEYS = {"tol", "box_lo", "box_hi", "newton_tol", "target_rse"}


def _parse_scale(token):
    token = token.strip()
    return SCALES[token] if token in SCALES else float(token)


def parse_config(text):
    """Parse flat ``key=value`` text into ``(base_spec, families, scales)``.

    ``family`` and ``scale`` accept comma-separated lists, which expand into a
    grid. Scales may be numbers or ``s1``/``s2``/``s3``. Lines starting with
    ``#`` are comments.
    """
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        raw[key] = value

    kwargs = {}
    families = tuple(f.strip() for f in raw.pop("family", "m1").split(","))
    scales = tuple(_parse_scale(s) for s in raw.pop("scale", "100").split(","))
    if "solvers" in raw:
        kwargs["solvers"] = tuple(s.strip() for s in raw.pop("solvers").split(","))
    if "timing" in raw:
        kwargs["timing"] = raw.pop("timing").lower() in ("1", "true", "yes")
    for key in list(raw):
        if key in _INT_KEYS:
            name = {"reps": "repetitions", "seed": "base_seed"}.get(key, key)
            kwargs[name] = int(raw.pop(key))
        elif key in _FLOAT_KEYS:
            kwargs[key] = float(raw.pop(key))
    if raw:
        raise ValueError(f"unknown config keys: {sorted(raw)}")
    spec = ExperimentSpec(family=families[0], scale=scales[0], **kwargs)
    for fam in families:
        replace(spec, family=fam)  # validates every family up front
    return spec, families, scales


def write_bench(out_dir, spec, families, scales, workers=1):
    """Run the grid and write per-experiment traces, run and summary CSVs."""
    os.makedirs(out_dir, exist_ok=True)
    table = run_grid(spec, families, scales, workers)
    for exp in dict.fromkeys(r[0] for r in table.rows):
        write_csv(os.path.join(out_dir, f"traces_{exp}.csv"), table.columns,
                  table.select(experiment=exp))
    write_csv(os.path.join(out_dir, "runs.csv"), TraceTable.RUN_COLUMNS, table.runs)
    write_csv(os.path.join(out_dir, "summary.csv"),
              ("experiment", "solver", "iteration", "mean_objective", "mean_rse"),
              summarize(table))
    write_csv(os.path.join(out_dir, "iteration_summary.csv"),
              ("experiment", "solver", "runs", "mean_iterations",
               "mean_iterations_to_target", "runs_reaching_target"),
              iteration_summary(table))
    if table.timing:
        write_csv(os.path.join(out_dir, "time_summary.csv"),
                  ("experiment", "solver", "time_bucket", "mean_rse"), time_summary(table))
    return table
