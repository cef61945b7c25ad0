"""Exit criteria. Each test appends one PASS/FAIL line to the terminal summary.

Run alone with ``pytest tests/test_acceptance.py``.
"""

import itertools
import math
import time

import numpy as np
import pytest
from scipy import stats

from conftest import ACCEPTANCE_LINES, bisect_survival, random_digraph
from giantscc.branching import giant_fraction, simulate_survival, survival
from giantscc.cli import main
from giantscc.config import ExperimentConfig, ModelSource
from giantscc.exploration import big_fraction, default_omega
from giantscc.experiment import read_csv, run_experiment
from giantscc.generator import sample_block, sample_digraph
from giantscc.model import discretize_kernel, mean_matrices, product_kernel, validate_model
from giantscc.scc import compute_scc, scc_oracle

KARP = validate_model([1.0], [[2.0]])
SUBCRIT = validate_model([1.0], [[0.5]])
BIPARTITE = validate_model([0.5, 0.5], [[0.0, 4.0], [4.0, 0.0]])
REDUCIBLE = validate_model([0.5, 0.5], [[3.0, 0.0], [0.0, 0.5]])
N_MC = 2 * 10**5
BIG_SUBSAMPLE = 20000


def record(criterion, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
    assert ok, detail


def sweep(model, n, trials, seed, **kw):
    kw.setdefault("subsample", BIG_SUBSAMPLE)
    cfg = ExperimentConfig(ModelSource(model), n_grid=(n,), trials=trials, seed=seed, **kw)
    res = run_experiment(cfg)
    assert not res.failures, res.failures
    return res


@pytest.fixture(scope="module")
def karp_sweep():
    start = time.perf_counter()
    res = sweep(KARP, N_MC, 20, seed=2024)
    return res, time.perf_counter() - start


def test_c01_homogeneous_supercritical(karp_sweep):
    res, elapsed = karp_sweep
    rstar = bisect_survival(2.0)
    oracle = (1.0 - math.exp(-2.0 * rstar)) ** 2
    rho = survival(KARP).rho_xy
    fracs = np.array([r.n1_frac for r in res.records])
    ok = (abs(rho - oracle) < 1e-9 and abs(fracs.mean() - rho) < 0.01 and np.all(np.abs(fracs - rho) < 0.03)
          and len(fracs) == 20 and elapsed < 120)
    record("C1 homogeneous p=2", ok,
           f"rho={rho:.12f} oracle={oracle:.12f} |d|={abs(rho - oracle):.1e}; mean N1/n={fracs.mean():.5f} "
           f"max dev={np.abs(fracs - rho).max():.5f}; {elapsed:.1f}s")


def test_c02_subcritical():
    res = sweep(SUBCRIT, N_MC, 10, seed=7)
    n1 = max(r.n1_frac for r in res.records)
    n2 = max(r.n2_frac for r in res.records)
    record("C2 subcritical p=0.5", n1 < 0.001 and n2 < 0.001, f"max N1/n={n1:.2e} max N2/n={n2:.2e}")


def test_c03_second_component_small(karp_sweep):
    res, _ = karp_sweep
    n2 = max(r.n2_frac for r in res.records)
    record("C3 N2 small", n2 < 0.01, f"max N2/n={n2:.2e} over {len(res.records)} trials")


def test_c04_two_type_irreducible():
    # symmetry: rho_1 = 1 - exp(-2 rho_2) and rho_2 = 1 - exp(-2 rho_1) reduce to the scalar equation
    rstar = bisect_survival(2.0)
    oracle = 0.5 * rstar**2 + 0.5 * rstar**2
    rho = survival(BIPARTITE).rho_xy
    res = sweep(BIPARTITE, N_MC, 10, seed=11)
    mean = np.mean([r.n1_frac for r in res.records])
    record("C4 two-type bipartite", abs(rho - oracle) < 1e-9 and abs(mean - rho) < 0.01,
           f"rho={rho:.12f} |d|={abs(rho - oracle):.1e}; mean N1/n={mean:.5f}")


def test_c05_reducible():
    rstar = bisect_survival(1.5)
    rho1_oracle = 0.5 * rstar**2
    rho, res_b = giant_fraction(REDUCIBLE)
    per = dict(res_b.type_scc_rho)
    res = sweep(REDUCIBLE, N_MC, 10, seed=13)
    mean = np.mean([r.n1_frac for r in res.records])
    ok = (not res_b.irreducible and per[(1,)] == 0.0 and abs(per[(0,)] - rho1_oracle) < 1e-9
          and rho == max(per[(0,)], 0.0) and abs(mean - rho) < 0.015)
    record("C5 reducible D_P", ok, f"rho1={per[(0,)]:.12f} oracle={rho1_oracle:.12f} rho2={per[(1,)]}; "
                                   f"mean N1/n={mean:.5f}")


def test_c06_big_fraction_estimator():
    n = 10**5
    omega = math.ceil(math.log(n))
    assert omega == default_omega(n)
    rho = survival(KARP).rho_xy
    spec = KARP.spec(n)
    vals = [big_fraction(sample_digraph(spec, seed=500 + t), omega) for t in range(5)]
    dev = max(abs(v - rho) for v in vals)
    record("C6 |B(omega)|/n", dev < 0.03, f"omega={omega} values={[round(v, 5) for v in vals]} max dev={dev:.5f}")


def test_c07_scc_oracle_equivalence():
    rng = np.random.default_rng(77)
    failures = 0
    for _ in range(10**4):
        n = int(rng.integers(1, 13))
        g = random_digraph(rng, n)
        failures += compute_scc(g).canonical() != scc_oracle(g).canonical()
    record("C7 SCC vs closure oracle", failures == 0, f"10000 digraphs, {failures} mismatches")


@pytest.mark.parametrize("name, model, seed", [("C1", KARP, 81), ("C4", BIPARTITE, 82), ("C5", REDUCIBLE, 83)])
def test_c08_branching_simulation(name, model, seed):
    runs = 10**5
    rng = np.random.default_rng(seed)
    res = survival(model)
    mx, my = mean_matrices(model)
    ok, worst = True, 0.0
    for analytic, m in ((res.rho_x, mx), (res.rho_y, my)):
        sim = simulate_survival(m, runs, rng, max_generations=200, max_population=10**4)
        se = np.sqrt(analytic * (1 - analytic) / runs)
        dev = np.abs(sim - analytic)
        # a zero-probability type must never survive
        ok &= bool(np.all(dev <= 3 * se))
        if np.any(se > 0):
            worst = max(worst, float(np.max(dev[se > 0] / se[se > 0])))
    record(f"C8 GW simulation ({name} model)", ok, f"worst deviation {worst:.2f} SE")


def test_c09_generator_distribution():
    model = validate_model([0.5, 0.5], [[1.0, 0.5], [1.5, 0.4]])
    spec = model.spec(2)
    probs = np.minimum(1.0, model.p / 2)  # with n=2 each type has one vertex
    cells = list(itertools.product(range(2), range(2)))
    expected = np.array([np.prod([probs[c] if b else 1 - probs[c] for c, b in zip(cells, bits)])
                         for bits in itertools.product((0, 1), repeat=4)])
    samples = 10**6
    counts = np.zeros(16)
    weights = np.array([8, 4, 2, 1])
    for s in range(samples):
        a = sample_digraph(spec, seed=s).arcs()
        counts[weights[2 * a[:, 0] + a[:, 1]].sum()] += 1
    p_enum = stats.chisquare(counts, expected * samples).pvalue

    rng = np.random.default_rng(909)
    trials, prob = 10**5, 0.1
    hits = np.zeros(64 * 64)
    for _ in range(trials):
        hits[sample_block(64, 64, prob, rng)] += 1
    freq = hits / trials
    # cell counts are Binomial(trials, prob): scale by the binomial variance, expectation known
    chi2 = np.sum((hits - trials * prob) ** 2 / (trials * prob * (1 - prob)))
    p_unif = stats.chi2.sf(chi2, df=hits.size)
    ok = p_enum > 0.001 and freq.min() >= 0.094 and freq.max() <= 0.106 and p_unif > 0.001
    record("C9 generator distribution", ok,
           f"n=2 enumeration p={p_enum:.3f}; cell freq in [{freq.min():.4f}, {freq.max():.4f}] uniformity p={p_unif:.3f}")


def test_c10_kernel_discretization():
    kf = product_kernel(4.0)
    m8 = validate_model(*discretize_kernel(kf, 8))
    m32 = validate_model(*discretize_kernel(kf, 32))
    r8, r32 = survival(m8).rho_xy, survival(m32).rho_xy
    res = sweep(m32, N_MC, 10, seed=1010)
    mean = np.mean([r.n1_frac for r in res.records])
    ok = abs(r8 - r32) < 0.01 and abs(mean - r32) < 0.02
    record("C10 kernel 4st", ok, f"rho(k=8)={r8:.5f} rho(k=32)={r32:.5f} mean N1/n={mean:.5f}")


def test_c11_sweep_determinism(tmp_path):
    (tmp_path / "cfg.yaml").write_text(
        "model: {probs: [0.4, 0.6], kernel: [[1.0, 3.0], [2.0, 0.5]]}\n"
        "n: [1000, 4000]\ntrials: 3\nseed: 99\nomega: ln\n")
    outs = []
    for i in range(2):
        out = tmp_path / f"run{i}.csv"
        assert main(["sweep", "--config", str(tmp_path / "cfg.yaml"), "--out", str(out)]) == 0
        outs.append(out)
    strip = lambda p: [ln.rsplit(",", 1)[0] for ln in p.read_text().splitlines()]
    same = strip(outs[0]) == strip(outs[1]) and len(read_csv(outs[0])) == 6
    record("C11 sweep determinism", same, "two runs byte-identical outside wall_ms")
