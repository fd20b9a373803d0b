"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v -s`` to see the lines inline; they are
also collected into the terminal summary.
"""

import itertools
import os
import time

import numpy as np

import oracles
from support import random_data, random_point
from vbmm import baselines, bregman, dirichlet, harness, specfun
from vbmm.bregman import SolverConfig, Status
from vbmm.dirichlet import BoxConstraint

FUNCS = {"lngamma": specfun.ln_gamma, "digamma": specfun.digamma,
         "trigamma": specfun.trigamma}


def _max_rel(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b) / np.abs(b)))


def test_criterion_01_special_functions(acceptance, oracle_table):
    x = oracle_table["x"]
    tic = time.perf_counter()
    errors = {name: _max_rel(f(x), oracle_table[name]) for name, f in FUNCS.items()}

    # shift arguments so that x and x + 1 are both exact doubles
    x1 = x + 1.0
    x = x1 - 1.0
    lg, lg1 = specfun.ln_gamma(x), specfun.ln_gamma(x1)
    dg, dg1 = specfun.digamma(x), specfun.digamma(x1)
    tg, tg1 = specfun.trigamma(x), specfun.trigamma(x1)
    recur = {
        "lngamma": np.abs(lg1 - lg - np.log(x)) / np.maximum.reduce(
            [np.ones_like(x), np.abs(lg1), np.abs(lg), np.abs(np.log(x))]),
        "digamma": np.abs(dg1 - dg - 1.0 / x) / np.maximum.reduce(
            [np.ones_like(x), np.abs(dg1), np.abs(dg), 1.0 / x]),
        "trigamma": np.abs(tg - tg1 - 1.0 / x ** 2) / np.maximum.reduce(
            [np.ones_like(x), tg, 1.0 / x ** 2]),
    }
    elapsed = time.perf_counter() - tic
    worst = max(errors.values())
    worst_recur = max(float(r.max()) for r in recur.values())
    ok = worst <= 1e-11 and worst_recur <= 1e-11 and elapsed < 5.0 and x.size == 10_000
    acceptance(1, "special functions vs high-precision oracle", ok,
               f"max rel err {worst:.2e}, recurrence {worst_recur:.2e}, {elapsed:.2f}s")


def test_criterion_02_majorization(acceptance):
    rng = np.random.default_rng(2)
    tic = time.perf_counter()
    worst = -np.inf
    n_pairs = 0
    for d in (2, 5, 20):
        for _ in range(20):
            data, _ = random_data(rng, d, int(rng.integers(5, 200)))
            obj = dirichlet.objective(data)
            family = dirichlet.bregman_family(data)
            for _ in range(10_000 // 60 + 1):
                beta = random_point(rng, d, 1e-3, 20.0)
                x = random_point(rng, d, 1e-3, 20.0)
                fx = dirichlet.nll(x, data)
                q = bregman.majorant_value(obj, family(beta), beta, x)
                worst = max(worst, (fx - q) / (1.0 + abs(fx)))
                n_pairs += 1
    elapsed = time.perf_counter() - tic
    ok = worst <= 1e-9 and n_pairs >= 10_000 and elapsed < 10.0
    acceptance(2, "f <= q_beta on random pairs", ok,
               f"{n_pairs} pairs, max (f-q)/(1+|f|) = {worst:.2e}, {elapsed:.2f}s")


def _surrogate_oracle(beta, data):
    """Minimize each coordinate of q_beta over log(alpha) by golden section in
    extended precision.

    q_beta = f(beta) + <grad f(beta), . - beta> + D_h(., beta) with
    h = sum a_i (-ln x_i) + b_i x_i^2 / 2. Dropping terms that do not depend on
    x leaves (g_i + a_i/beta_i - b_i beta_i) x_i - a_i ln x_i + b_i x_i^2 / 2,
    which keeps the compared values free of large cancelling constants.
    """
    ld = np.longdouble
    h = dirichlet.bregman_family(data)(beta)
    g = dirichlet.nll_gradient(beta, data).astype(ld)
    a, b, y = h.a.astype(ld), h.b.astype(ld), beta.astype(ld)
    lin = g + a / y - b * y

    def coordinate(u):
        x = np.exp(u)
        return lin * x - a * u + 0.5 * b * x * x

    lo = np.full(beta.size, np.log(1e-15))
    hi = np.full(beta.size, np.log(1e15))
    u = bregman.golden_section(coordinate, lo, hi, xtol=1e-13, dtype=ld)
    return np.exp(u)


def test_criterion_03_closed_form_vs_golden_section(acceptance):
    rng = np.random.default_rng(3)
    tic = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        d = int(rng.integers(2, 11))
        data, _ = random_data(rng, d, int(rng.integers(5, 200)))
        beta = random_point(rng, d, 1e-3, 1e3)
        closed = dirichlet.vbmm_dirichlet_step(beta, data)
        oracle = _surrogate_oracle(beta, data)
        worst = max(worst, float(np.max(np.abs(closed - oracle) / oracle)))
    elapsed = time.perf_counter() - tic
    ok = worst <= 1e-8 and elapsed < 10.0
    acceptance(3, "closed-form step vs golden-section surrogate minimizer", ok,
               f"1000 states, max rel diff {worst:.2e}, {elapsed:.2f}s")


def test_criterion_04_monotone_descent(acceptance):
    rng = np.random.default_rng(4)
    cfg = SolverConfig(keep_iterates=True)
    worst_mono = worst_desc = -np.inf
    steps = 0
    statuses = set()
    for _ in range(100):
        data, _ = random_data(rng, 20, 50)
        family = dirichlet.bregman_family(data)
        _, trace = dirichlet.fit_vbmm(data, cfg=cfg)
        statuses.add(trace.status)
        for k in range(1, len(trace.iterates)):
            x_old, x_new = trace.iterates[k - 1], trace.iterates[k]
            f_old, f_new = trace.objective[k - 1], trace.objective[k]
            slack = 1e-9 * (1.0 + abs(f_old))
            dist = bregman.bregman_divergence(family(x_old), x_old, x_new)
            worst_mono = max(worst_mono, (f_new - f_old) / slack)
            worst_desc = max(worst_desc, (f_new - f_old + dist) / slack)
            steps += 1
    ok = worst_mono <= 1.0 and worst_desc <= 1.0 and statuses == {Status.CONVERGED}
    acceptance(4, "monotone decrease and descent inequality", ok,
               f"100 runs, {steps} steps, worst slack use {max(worst_mono, worst_desc):.2e}")


def test_criterion_05_minimizer_agreement(acceptance):
    rng = np.random.default_rng(5)
    cfg = SolverConfig(max_iterations=200_000, rel_change_tolerance=1e-13)
    ncfg = baselines.NewtonConfig(gradient_norm_tolerance=1e-12)
    worst = 0.0
    statuses = set()
    for _ in range(50):
        d = int(rng.integers(5, 51))
        data, _ = random_data(rng, d, int(rng.integers(50, 201)))
        x0 = np.full(d, 10.0)
        runs = [dirichlet.fit_vbmm(data, x0, cfg), dirichlet.fit_bmm(data, x0, cfg),
                baselines.newton_dirichlet(data, x0, ncfg),
                baselines.minka_fixed_point(data, x0, cfg)]
        statuses.update(t.status for _, t in runs)
        for (a, _), (b, _) in itertools.combinations(runs, 2):
            worst = max(worst, _max_rel(a, b))
    ok = worst <= 1e-6 and statuses == {Status.CONVERGED}
    acceptance(5, "VBMM, BMM, Newton and fixed-point agree", ok,
               f"50 problems, max pairwise rel diff {worst:.2e}, statuses {sorted(s.value for s in statuses)}")


def _read_csv(path):
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split(",")
        return [dict(zip(header, line.rstrip("\n").split(","))) for line in fh]


def test_criterion_06_vbmm_not_slower_than_bmm(acceptance, tmp_path):
    spec = harness.ExperimentSpec(d=50, M=100, repetitions=20, base_seed=0)
    tic = time.perf_counter()
    harness.write_bench(str(tmp_path), spec, harness.FAMILIES, (100.0, 10.0, 1.0))
    elapsed = time.perf_counter() - tic
    runs = _read_csv(tmp_path / "runs.csv")
    hits = {(r["experiment"], r["solver"], r["repetition"]): int(r["iterations_to_target"])
            for r in runs}
    keys = [(e, rep) for e, s, rep in hits if s == "vbmm"]
    wins = sum(1 for e, rep in keys
               if hits[(e, "vbmm", rep)] >= 0
               and (hits[(e, "bmm", rep)] < 0 or hits[(e, "vbmm", rep)] <= hits[(e, "bmm", rep)]))
    share = wins / len(keys)
    summary = _read_csv(tmp_path / "iteration_summary.csv")
    reported = {(r["experiment"], r["solver"]) for r in summary}
    all_reported = len(reported) == 9 * len(harness.SOLVERS) and all(
        float(r["mean_iterations"]) > 0 for r in summary)
    ok = len(keys) == 180 and share >= 0.95 and all_reported and elapsed < 120.0
    acceptance(6, "VBMM reaches RSE 1e-8 no later than BMM", ok,
               f"{wins}/{len(keys)} runs, iteration counts for {len(reported)} "
               f"experiment/solver pairs, {elapsed:.1f}s")


def test_criterion_07_box_constrained(acceptance):
    d, m, lo, hi = 50, 100, 1e-10, 1.0
    box = BoxConstraint.uniform(lo, hi, d)
    cfg = SolverConfig(max_iterations=100_000, rel_change_tolerance=1e-14, keep_iterates=True)
    tic = time.perf_counter()
    feasible = monotone = True
    worst_kkt = worst_ref = worst_indep = 0.0
    active = 0
    for seed in range(5):
        rng = np.random.default_rng(700 + seed)
        data = dirichlet.sample(rng.uniform(0.05, 2.0, d), m, seed)
        x, trace = dirichlet.fit_vbmm(data, cfg=cfg, box=box)
        feasible &= all(box.contains(it) for it in trace.iterates)
        obj = np.array(trace.objective)
        monotone &= bool(np.all(np.diff(obj) <= 1e-10 * (1.0 + np.abs(obj[:-1]))))
        worst_kkt = max(worst_kkt, float(dirichlet.kkt_residual(x, data, box).max()))
        ref = harness.reference_optimum(data, box)
        worst_ref = max(worst_ref, float(np.linalg.norm(x - ref) / np.linalg.norm(ref)))
        indep = oracles.boxed_minimizer(
            lambda a: dirichlet.nll(a, data) / m, lambda a: dirichlet.nll_gradient(a, data) / m,
            lambda a: dirichlet.nll_hessian(a, data) / m, box.lower, box.upper,
            np.full(d, 0.5))
        worst_indep = max(worst_indep, float(np.linalg.norm(x - indep) / np.linalg.norm(indep)))
        active += int(np.sum(x >= hi))
    elapsed = time.perf_counter() - tic
    ok = (feasible and monotone and worst_kkt <= 1e-8 and worst_ref <= 1e-6
          and worst_indep <= 1e-6 and elapsed < 30.0)
    acceptance(7, "box-constrained VBMM on [1e-10, 1]", ok,
               f"KKT {worst_kkt:.1e}, vs long-run ref {worst_ref:.1e}, "
               f"vs L-BFGS-B+Newton {worst_indep:.1e}, {active} active bounds, {elapsed:.1f}s")


def test_criterion_08_three_points_identity(acceptance):
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(10_000):
        d = int(rng.choice([2, 5, 20]))
        data, _ = random_data(rng, d, int(rng.integers(5, 100)))
        h = dirichlet.bregman_family(data)(random_point(rng, d, 1e-3))
        x, y, z = (random_point(rng, d, 1e-3) for _ in range(3))
        res = bregman.three_points_residual(h, x, y, z)
        lhs = (bregman.bregman_divergence(h, z, x) - bregman.bregman_divergence(h, z, y)
               - bregman.bregman_divergence(h, y, x))
        worst = max(worst, abs(res) / (1.0 + abs(lhs)))
    acceptance(8, "three points identity under the Dirichlet family", worst <= 1e-10,
               f"10000 triples, max |residual|/(1+|LHS|) = {worst:.2e}")


def test_criterion_09_curvature_table(acceptance, oracle_table):
    c0 = dirichlet.curvature(0.0)
    at0 = abs(c0 - np.pi ** 2 / 6.0)
    t = np.array([1e-3])
    switch = float(abs(dirichlet._curvature_taylor(t) - dirichlet._curvature_direct(t))[0])
    idx = int(np.flatnonzero(oracle_table["curv_t"] == 1e-3)[0])
    vs_oracle = abs(dirichlet.curvature(1e-3) - oracle_table["curv_c"][idx])
    rows = harness.emit_curvature_table(1e-8, 1e6, 2000)
    cs = np.array([c for _, c in rows])
    bounded = bool(np.all(cs > 0.0) and np.all(cs <= np.pi ** 2 / 6.0))
    ok = at0 <= 1e-12 and switch <= 1e-9 and vs_oracle <= 1e-9 and bounded
    acceptance(9, "curvature table", ok,
               f"|c(0)-pi^2/6| = {at0:.1e}, branch gap {switch:.1e}, "
               f"vs oracle {vs_oracle:.1e}, {cs.size} points in (0, pi^2/6]")


def test_criterion_10_coercivity_bound(acceptance):
    rng = np.random.default_rng(10)
    worst = np.inf
    for _ in range(1000):
        d = int(rng.integers(2, 21))
        data, _ = random_data(rng, d, int(rng.integers(2, 60)))
        assert not data.is_degenerate
        alpha = np.exp(rng.uniform(np.log(1e-3), np.log(1e3), d))
        gap = dirichlet.nll(alpha, data) - dirichlet.coercivity_lower_bound(alpha, data)
        worst = min(worst, gap)
    acceptance(10, "coercivity lower bound holds strictly", worst > 0.0,
               f"1000 instances, min gap {worst:.3e}")


def test_criterion_11_bench_determinism(acceptance, tmp_path):
    spec_text = "family=m1,m2\nscale=s1,s3\nd=10\nM=30\nreps=3\nseed=11\n"
    spec_file = tmp_path / "spec.txt"
    spec_file.write_text(spec_text)
    from vbmm.cli import main
    main(["bench", "--spec", str(spec_file), "--out", str(tmp_path / "a")])
    main(["bench", "--spec", str(spec_file), "--out", str(tmp_path / "b"), "--workers", "2"])
    names = sorted(os.listdir(tmp_path / "a"))
    same = names == sorted(os.listdir(tmp_path / "b")) and all(
        (tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes() for n in names)
    acceptance(11, "bench output is byte-identical across runs", same and len(names) >= 5,
               f"{len(names)} files compared")
