"""Acceptance suite: ten end-to-end criteria, one test per criterion.

Each test prints a single summary line with the measured quantities, so
a verbose run doubles as a checklist.  Criteria that pin a runtime
budget assert it.  Tolerances are written next to the asserts; none are
tuned to the observed values.
"""
import itertools
import time

import numpy as np

from neighsel.experiments import (
    ExperimentConfig,
    run_figure1,
    run_level_control,
    run_prop1_demo,
    run_robustness,
    run_table1,
)
from neighsel.formats import canonical_json
from neighsel.baselines import ipf_fit
from neighsel.graph import EdgeSet
from neighsel.lasso import LassoProblem, kkt_residual, lambda_max, lasso_fit, lasso_objective
from neighsel.numeric import DataMatrix, SymMatrix, derive_seed, standardize
from neighsel.synth import (
    build_model,
    generate_geometric_graph,
    population_coefficients,
    sample_gaussian,
)


def report(num: int, ok: bool, detail: str) -> str:
    line = f"ACCEPTANCE {num:02d} {'PASS' if ok else 'FAIL'}: {detail}"
    print(line)
    return line


def random_problem(rng: np.random.Generator):
    n = int(rng.integers(20, 201))
    p = int(rng.integers(5, 501))
    data = standardize(DataMatrix(rng.standard_normal((n, p)), standardized=False))
    allowed = tuple(b for b in range(p) if b != 0)
    top = lambda_max(data, 0, allowed)
    lam = float(rng.uniform(0.0, 1.0)) * top
    lam = max(lam, 1e-6 * top)  # criterion wants lam in (0, lam_max]
    return LassoProblem(data, 0, allowed, lam)


def test_criterion_01_kkt_certification():
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        fit = lasso_fit(random_problem(rng))
        worst = max(worst, kkt_residual(fit))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and elapsed <= 60.0
    line = report(1, ok, f"worst kkt residual {worst:.3e} over 200 problems in {elapsed:.1f}s")
    assert ok, line


def enumeration_oracle(problem: LassoProblem) -> np.ndarray:
    """Global minimizer by trying every sign pattern on the predictors.

    For a candidate pattern s the stationary coefficients solve
    gram[A, A] theta = corr[A] - (lam / 2) s; the pattern is feasible
    when the solved signs match s and every inactive gradient is within
    lam.  The best feasible candidate by objective value is returned.
    """
    x = problem.data.values
    n = problem.data.n
    y = x[:, problem.target]
    cols = list(problem.allowed)
    best, best_val = None, np.inf
    for pattern in itertools.product((-1, 0, 1), repeat=len(cols)):
        active = [c for c, s in zip(cols, pattern) if s != 0]
        signs = np.array([s for s in pattern if s != 0], dtype=float)
        theta = np.zeros(problem.data.p)
        if active:
            xa = x[:, active]
            rhs = xa.T @ y / n - problem.lam / 2.0 * signs
            try:
                sol = np.linalg.solve(xa.T @ xa / n, rhs)
            except np.linalg.LinAlgError:
                continue
            if np.any(np.sign(sol) != signs):
                continue
            theta[active] = sol
        resid = y - x @ theta
        grads = np.abs(2.0 * (x[:, cols].T @ resid) / n)
        inactive = [i for i, s in enumerate(pattern) if s == 0]
        if np.any(grads[inactive] > problem.lam * (1 + 1e-9) + 1e-12):
            continue
        val = lasso_objective(problem, theta)
        if val < best_val:
            best, best_val = theta, val
    assert best is not None, "no sign pattern satisfied the optimality system"
    return best


def test_criterion_02_enumeration_oracle_equivalence():
    rng = np.random.default_rng(202)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(10, 51))
        p = int(rng.integers(2, 7))
        data = standardize(DataMatrix(rng.standard_normal((n, p)), standardized=False))
        allowed = tuple(b for b in range(p) if b != 0)
        top = lambda_max(data, 0, allowed)
        lam = max(float(rng.uniform(0.0, 1.0)), 1e-3) * top
        problem = LassoProblem(data, 0, allowed, lam)
        fit = lasso_fit(problem)
        oracle = enumeration_oracle(problem)
        worst = max(worst, float(np.max(np.abs(fit.coefficients - oracle))))
    ok = worst <= 1e-6
    line = report(2, ok, f"worst coefficient gap to enumeration oracle {worst:.3e}")
    assert ok, line


def test_criterion_03_population_pattern_recovery():
    mismatches = 0
    for i in range(20):
        graph = generate_geometric_graph(50, derive_seed(303, i), "text")
        model = build_model(graph)
        others = lambda a: [b for b in range(50) if b != a]
        for a in range(50):
            theta = population_coefficients(model.covariance, a, others(a))
            found = tuple(sorted(np.flatnonzero(np.abs(theta) > 1e-8)))
            if found != graph.neighbors(a):
                mismatches += 1
    ok = mismatches == 0
    line = report(3, ok, f"{mismatches} node neighborhoods mismatched over 20 models")
    assert ok, line


def test_criterion_04_level_control():
    start = time.perf_counter()
    agg = run_level_control(ExperimentConfig(experiment="level", seed=404)).aggregates
    elapsed = time.perf_counter() - start
    rates = {rule: agg[rule]["violation_rate"] for rule in ("and", "or")}
    ok = all(r <= 0.07 for r in rates.values()) and elapsed <= 600.0
    line = report(
        4, ok,
        f"violation rates and={rates['and']:.4f} or={rates['or']:.4f} "
        f"(bound 0.07) in {elapsed:.0f}s",
    )
    assert ok, line


def test_criterion_05_small_graph_reference_counts():
    and_ref = {10: 8.5, 20: 9.5, 30: 14.1}
    random_ref = {10: 0.2, 20: 0.1, 30: 0.1}
    report_ = run_table1(ExperimentConfig(experiment="table1", seed=42))
    cells = report_.aggregates["cells"]
    and0 = {p: cells[str(p)]["and"]["mean"][0] for p in (10, 20, 30)}
    rnd0 = {p: cells[str(p)]["random"]["mean"][0] for p in (10, 20, 30)}
    or0_30 = cells["30"]["or"]["mean"][0]
    fs0_30 = cells["30"]["fs"]["mean"][0]

    checks = {
        f"and@p={p} {and0[p]:.2f} in {ref - 3:.1f}..{ref + 3:.1f}": abs(and0[p] - ref) <= 3.0
        for p, ref in and_ref.items()
    }
    checks.update(
        {
            f"random@p={p} {rnd0[p]:.2f} in {ref - 0.5:.1f}..{ref + 0.5:.1f}":
                abs(rnd0[p] - ref) <= 0.5
            for p, ref in random_ref.items()
        }
    )
    checks[f"order@p=30 and {and0[30]:.2f} > or {or0_30:.2f}"] = and0[30] > or0_30
    checks[f"order@p=30 or {or0_30:.2f} > fs {fs0_30:.2f}"] = or0_30 > fs0_30
    checks[f"fs@p=30 {fs0_30:.2f} < 3"] = fs0_30 < 3.0
    # the one reference cell the generator cannot reach is excluded from
    # numeric checks and must be flagged in the report instead
    assert report_.aggregates["flagged_cells"][0]["p"] == 20

    failed = [label for label, passed in checks.items() if not passed]
    ok = not failed
    line = report(5, ok, f"{len(checks) - len(failed)}/{len(checks)} reference checks; failing: {failed}")
    assert ok, line


def test_criterion_06_large_demonstration():
    start = time.perf_counter()
    row = run_figure1(ExperimentConfig(experiment="fig1", seed=606)).replicates[0]
    elapsed = time.perf_counter() - start
    tp, fp = row["and"]["tp"], row["and"]["fp"]
    cross = row["and"]["cross_component_fp"] + row["or"]["cross_component_fp"]
    ok = tp >= 1000 and fp <= 10 and cross == 0 and elapsed <= 300.0
    line = report(
        6, ok,
        f"kernel {row['kernel']} true_edges {row['true_edges']}: "
        f"tp={tp} (>=1000) fp={fp} (<=10) cross={cross} (=0) in {elapsed:.0f}s",
    )
    assert ok, line


def test_criterion_07_cv_overselects_level_does_not():
    agg = run_prop1_demo(ExperimentConfig(experiment="prop1", seed=707)).aggregates
    cv, level = agg["cv_wrong_rate"], agg["level_wrong_rate"]
    ok = cv >= 0.5 and level <= 0.1
    line = report(7, ok, f"wrong-neighborhood rate cv={cv:.2f} (>=0.5) level={level:.2f} (<=0.1)")
    assert ok, line


def test_criterion_08_contamination_robustness():
    agg = run_robustness(ExperimentConfig(experiment="robust", seed=808)).aggregates
    fdp = agg["contaminated"]["or"]["pooled_fdp"]
    increase = agg["fdp_increase"]["or"]
    ok = fdp <= 0.05 and increase <= 0.05
    line = report(8, ok, f"contaminated FDP(or)={fdp:.4f} (<=0.05) increase={increase:.4f} (<=0.05)")
    assert ok, line


def test_criterion_09_ipf_three_chain():
    k_true = np.array([[1.0, 0.4, 0.0], [0.4, 1.0, 0.4], [0.0, 0.4, 1.0]])
    cov = SymMatrix(np.linalg.inv(k_true))
    data = sample_gaussian(cov, 200, 909)
    s = data.values.T @ data.values / data.n
    chain = EdgeSet(p=3, edges=frozenset({(0, 1), (1, 2)}), rule="truth")
    fit = ipf_fit(SymMatrix(s), chain)

    # decomposable closed form: clique inverses minus the separator inverse
    k_closed = np.zeros((3, 3))
    k_closed[:2, :2] += np.linalg.inv(s[:2, :2])
    k_closed[1:, 1:] += np.linalg.inv(s[1:, 1:])
    k_closed[1, 1] -= 1.0 / s[1, 1]

    gap = float(np.max(np.abs(fit.fitted_precision.values - k_closed)))
    steps = np.diff(fit.loglik_path)
    monotone = bool(np.all(steps >= -1e-12))
    off_graph = abs(float(fit.fitted_precision.values[0, 2]))
    ok = gap <= 1e-8 and monotone and off_graph <= 1e-8
    line = report(
        9, ok,
        f"closed-form gap {gap:.2e} (<=1e-8), loglik monotone {monotone}, "
        f"off-graph entry {off_graph:.2e} (<=1e-8)",
    )
    assert ok, line


def test_criterion_10_worker_count_determinism():
    configs = [
        ExperimentConfig(experiment="level", seed=1010, p=20, n=40, replicates=20),
        ExperimentConfig(experiment="robust", seed=1010, p=20, n=60, replicates=6),
    ]
    runners = {"level": run_level_control, "robust": run_robustness}
    identical = []
    for cfg in configs:
        run = runners[cfg.experiment]
        one = canonical_json(run(cfg, workers=1).payload())
        eight = canonical_json(run(cfg, workers=8).payload())
        identical.append(one == eight)
    ok = all(identical)
    line = report(10, ok, f"byte-identical reports across workers 1 and 8: {identical}")
    assert ok, line
