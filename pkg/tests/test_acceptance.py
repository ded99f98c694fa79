"""Acceptance suite: one test (or one test per reward) per criterion, each printing a PASS/FAIL line.

Training-based criteria share one set of runs built by a session fixture:
30 pairs each of linear / inverse / exp reward under the power-law prior,
plus 30 linear pairs under the uniform prior.

Environment knobs:
    EN_ACCEPT_UPDATES   updates per pair (default 10000; 3000 is the allowed downscale)
    EN_ACCEPT_WORKERS   worker processes (default: all cores)
    EN_ACCEPT_DIR       keep runs here and reuse them when their config matches
"""

import itertools
import json
import os
import time
from pathlib import Path

import numpy as np
import pytest
from scipy import stats

from emergent_numerals.analysis import comm_cost_bits, listener_posterior
from emergent_numerals.consensus import (agreement_matrix, correlation_cluster, exhaustive_cluster,
                                         objective)
from emergent_numerals.core import NamingDistribution, NeedPrior, NumeralSystem, entropy, reward
from emergent_numerals.frontier import Mode, build_envelope, exact_frontier, exhaustive_exact, optimize_exact
from emergent_numerals.neural import AdamState, AgentNet, adam_step, flatten_grads, loss_and_grads, sample_mask
from emergent_numerals.priors import blahut_arimoto_cap, maxent_prior
from emergent_numerals.runner import (ExperimentSpec, load_config, load_namings, load_prior, read_csv,
                                      run_experiment)
from emergent_numerals.weberfit import NU_GRID, fit_pair, fit_weber, gaussian_model_rows

UPDATES = int(os.environ.get("EN_ACCEPT_UPDATES", "10000"))
WORKERS = int(os.environ.get("EN_ACCEPT_WORKERS", str(os.cpu_count() or 1)))
PAIRS = 30
RUNS = {  # name: (reward, prior, master seed)
    "linear_powerlaw": ("linear", "powerlaw", 101),
    "inverse_powerlaw": ("inverse", "powerlaw", 102),
    "exp_powerlaw": ("exp", "powerlaw", 103),
    "linear_uniform": ("linear", "uniform", 104),
}


@pytest.fixture
def report(capsys):
    def emit(tag, ok, detail, seconds=None):
        timing = f" [{seconds:.1f}s]" if seconds is not None else ""
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} {tag}: {detail}{timing}")
        return ok
    return emit


# ------------------------------------------------------------- shared runs

def _spec(name, out):
    kind, prior, seed = RUNS[name]
    return ExperimentSpec(name=name, reward=kind, prior=prior, pairs=PAIRS, updates=UPDATES,
                          seed=seed, out=str(out), workers=WORKERS)


def _cached(spec) -> bool:
    out = Path(spec.out)
    if not (out / "results.csv").exists():
        return False
    want = {k: v for k, v in spec.__dict__.items() if k not in ("workers", "out")}
    return load_config(out) == json.loads(json.dumps(want))


@pytest.fixture(scope="session")
def runs(tmp_path_factory):
    root = Path(os.environ["EN_ACCEPT_DIR"]) if "EN_ACCEPT_DIR" in os.environ \
        else tmp_path_factory.mktemp("acceptance")
    out = {}
    for name in RUNS:
        spec = _spec(name, root / name)
        if not _cached(spec):
            run_experiment(spec)
        out[name] = Path(spec.out)
    return out


@pytest.fixture(scope="session")
def powerlaw_envelope(runs):
    prior = load_prior(runs["linear_powerlaw"])
    pts = exact_frontier(prior, restarts=1000, rng=7)
    return build_envelope(pts)


# ---------------------------------------------------------------- criteria

def test_c1_numeric_core(report):
    t0 = time.perf_counter()
    worst = 0.0
    for seed in range(50):
        rng = np.random.default_rng(seed)
        n_in, n_out, hid = (int(v) for v in rng.integers(2, 8, size=3))
        net = AgentNet.init(n_in, n_out, hidden=hid, rng=rng)
        net.flat += rng.normal(0, 0.1, net.flat.size)
        B = int(rng.integers(1, 8))
        xs, acts, tg = rng.integers(n_in, size=B), rng.integers(n_out, size=B), rng.random(B)
        masks = sample_mask(0.7, rng, (B, hid))
        _, g = loss_and_grads(net, xs, acts, tg, masks)
        g = flatten_grads(g)
        num = np.zeros_like(g)
        for i in range(num.size):
            old = net.flat[i]
            net.flat[i] = old + 1e-5
            lp, _ = loss_and_grads(net, xs, acts, tg, masks)
            net.flat[i] = old - 1e-5
            lm, _ = loss_and_grads(net, xs, acts, tg, masks)
            net.flat[i] = old
            num[i] = (lp - lm) / 2e-5
        worst = max(worst, np.abs(g - num).max() / max(np.abs(num).max(), 1e-12))

    # Adam: two steps of g = 1 against the hand-written recurrence
    p, st = {"x": np.array([0.0])}, AdamState({}, {}, 0)
    m = v = 0.0
    x = 0.0
    adam_err = 0.0
    for t in (1, 2):
        adam_step(p, {"x": np.array([1.0])}, st)
        m, v = 0.9 * m + 0.1, 0.999 * v + 0.001
        x -= 0.001 * (m / (1 - 0.9 ** t)) / (np.sqrt(v / (1 - 0.999 ** t)) + 1e-8)
        adam_err = max(adam_err, abs(p["x"][0] - x))

    n, h = np.array(list(itertools.product(range(1, 21), repeat=2))).T
    rewards_ok = True
    for kind in ("linear", "inverse", "exp"):
        r = reward(kind, n, h)
        d = np.abs(n - h)
        per_d = np.array([np.unique(r[d == k]) for k in range(20)], dtype=object)
        rewards_ok &= bool(np.array_equal(r, reward(kind, h, n)))
        rewards_ok &= bool(np.all(r[d == 0] == 1.0))
        rewards_ok &= all(len(u) == 1 for u in per_d)
        rewards_ok &= bool(np.all(np.diff([u[0] for u in per_d]) < 0))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-4 and adam_err <= 1e-6 and rewards_ok and dt < 10
    assert report("C1 numeric core", ok,
                  f"grad rel err {worst:.2e} (<=1e-4), adam err {adam_err:.1e} (<=1e-6), "
                  f"reward properties {'hold' if rewards_ok else 'VIOLATED'}", dt)


def test_c2_cost_oracle(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(100):
        p = rng.dirichlet(np.ones(20))
        a = rng.integers(int(rng.integers(1, 11)), size=20)
        direct = sum(p[a == w].sum() * entropy(p[a == w] / p[a == w].sum()) for w in np.unique(a))
        worst = max(worst, abs(comm_cost_bits(NamingDistribution.from_assignment(a), NeedPrior(p)) - direct))
    single = 0.0
    for _ in range(20):
        q = NeedPrior(rng.dirichlet(np.ones(20)))
        single = max(single, abs(comm_cost_bits(NamingDistribution(np.ones((20, 1))), q) - q.entropy()))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-9 and single <= 1e-9 and dt < 5
    assert report("C2 cost oracle", ok,
                  f"max |cost - cell formula| {worst:.1e}, single-word vs entropy {single:.1e} (<=1e-9)", dt)


def test_c3_frontier(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    hits = 0
    for _ in range(100):
        p = NeedPrior(rng.dirichlet(np.ones(8)))
        hits += all(abs(optimize_exact(k, p, Mode.BEST, 200, rng).cost_bits
                        - exhaustive_exact(k, p.probs, Mode.BEST)[1]) <= 1e-9 for k in (1, 2, 3))
    w = np.arange(1, 21) ** -1.836
    prior = NeedPrior(w / w.sum())
    env = build_envelope(exact_frontier(prior, restarts=1000, rng=3, modes=[Mode.BEST]))
    best = np.array([env[("exact", k)][0] for k in range(1, 21)])
    mono = bool(np.all(np.diff(best) <= 1e-12))
    k1 = abs(best[0] - prior.entropy())
    dt = time.perf_counter() - t0
    ok = hits >= 99 and mono and k1 <= 1e-9 and best[-1] == 0.0 and dt < 120
    assert report("C3 frontier", ok,
                  f"|N|=8 oracle matches {hits}/100 (>=99), best non-increasing={mono}, "
                  f"k=1 vs H(prior) {k1:.1e}, k=20 cost {best[-1]}", dt)


def _band_stats(results, env):
    costs = np.array([float(r["cost_bits"]) for r in results])
    terms = np.array([int(r["terms"]) for r in results])
    best = np.array([env[("exact", k)][0] for k in terms])
    worst = np.array([env[("exact", k)][1] for k in terms])
    inside = (costs >= best - 1e-9) & (costs <= worst + 1e-9)
    return inside.mean(), np.median(costs - best), terms


@pytest.mark.parametrize("kind", ["linear", "inverse", "exp"])
def test_c4_near_optimal(kind, runs, powerlaw_envelope, report):
    results = read_csv(runs[f"{kind}_powerlaw"] / "results.csv")
    frac, gap, terms = _band_stats(results, powerlaw_envelope)
    ok = len(results) == PAIRS and frac >= 0.90 and gap <= 0.3
    assert report(f"C4 near-optimality [{kind}]", ok,
                  f"{len(results)} pairs, {frac:.0%} inside band (>=90%), median gap to best "
                  f"{gap:.3f} bits (<=0.3), terms {np.bincount(terms, minlength=11)[1:].tolist()}")


def test_c5_prior_skew(runs, report):
    t_pl = np.array([int(r["terms"]) for r in read_csv(runs["linear_powerlaw"] / "results.csv")])
    t_un = np.array([int(r["terms"]) for r in read_csv(runs["linear_uniform"] / "results.csv")])
    test = stats.mannwhitneyu(t_pl, t_un, alternative="less")
    ok = t_pl.mean() < t_un.mean() and test.pvalue < 0.05
    assert report("C5 prior skew", ok,
                  f"mean terms power-law {t_pl.mean():.2f} vs uniform {t_un.mean():.2f}, "
                  f"one-sided Mann-Whitney p = {test.pvalue:.2g} (<0.05)")


def test_c6_weber(runs, report):
    t0 = time.perf_counter()
    d = runs["linear_powerlaw"]
    prior = load_prior(d)
    pooled = fit_weber([listener_posterior(nm, prior) for nm in load_namings(d).values()])
    # synthetic posteriors at every grid nu, built so each row's own mean is its mu
    n = np.arange(1, 21)
    recovered = 0
    for nu in NU_GRID:
        mus = np.arange(2.0, 20.0)
        for _ in range(500):
            rows = gaussian_model_rows(mus, [nu])[0]
            new = rows @ n
            if np.abs(new - mus).max() < 1e-14:
                break
            mus = new
        recovered += fit_pair(gaussian_model_rows(mus, [nu])[0]).nu == nu
    dt = time.perf_counter() - t0
    ok = 0.20 <= pooled.nu <= 0.45 and pooled.mse_mean <= 0.02 and recovered == NU_GRID.size and dt < 60
    assert report("C6 Weber fit", ok,
                  f"pooled nu {pooled.nu:.2f} (in [0.20, 0.45]), MSE {pooled.mse_mean:.4f} "
                  f"+- {pooled.mse_std:.4f} (<=0.02), synthetic recovery {recovered}/{NU_GRID.size}", dt)


def test_c7_priors(report):
    t0 = time.perf_counter()
    ba = blahut_arimoto_cap(NamingDistribution(np.eye(10)))
    ba_err = max(np.abs(ba.prior.probs - 0.1).max(), abs(ba.capacity_bits - np.log2(10)))
    rng = np.random.default_rng(7)
    me_err = res_max = 0.0
    for _ in range(20):
        k = int(rng.integers(1, 8))
        a = rng.integers(k, size=20)
        a[:k] = np.arange(k)
        pw = rng.dirichlet(np.ones(k))
        res = maxent_prior(NamingDistribution.from_assignment(a), pw)
        me_err = max(me_err, np.abs(res.prior.probs - pw[a] / np.bincount(a)[a]).max())
        res_max = max(res_max, res.residual)
    dt = time.perf_counter() - t0
    ok = ba_err <= 1e-6 and me_err <= 1e-6 and res_max <= 1e-6 and dt < 5
    assert report("C7 priors", ok,
                  f"BA identity err {ba_err:.1e}, MaxEnt vs closed form {me_err:.1e}, "
                  f"max residual {res_max:.1e} (all <=1e-6)", dt)


def test_c8_consensus(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    recovered = 0
    for _ in range(20):
        s = NumeralSystem(rng.integers(int(rng.integers(1, 8)), size=20)).canonical()
        recovered += correlation_cluster(agreement_matrix([s] * 10), 50, rng) == s
    hits = 0
    for _ in range(100):
        A = rng.integers(-5, 6, size=(6, 6))
        M = np.triu(A, 1) + np.triu(A, 1).T
        hits += objective(M, correlation_cluster(M, 50, rng).assignment) == exhaustive_cluster(M)[1]
    dt = time.perf_counter() - t0
    ok = recovered == 20 and hits >= 99 and dt < 30
    assert report("C8 consensus", ok,
                  f"identical-system recovery {recovered}/20, |N|=6 oracle matches {hits}/100 (>=99)", dt)


def test_c9_determinism(tmp_path, report):
    t0 = time.perf_counter()
    names = ["results.csv", "modes.csv", "term_hist.csv", "failures.csv", "prior.csv"]
    outputs = []
    for workers in range(1, 9):
        spec = ExperimentSpec(reward="inverse", pairs=8, updates=100, naming_samples=100, seed=9,
                              workers=workers, out=str(tmp_path / f"w{workers}"))
        d = run_experiment(spec)
        files = {n: (d / n).read_bytes() for n in names}
        files.update({str(p.relative_to(d)): p.read_bytes() for p in sorted(d.glob("pairs/*/*"))})
        outputs.append(files)
    same = all(o == outputs[0] for o in outputs[1:])
    dt = time.perf_counter() - t0
    assert report("C9 determinism", same,
                  f"workers 1..8 give {'byte-identical' if same else 'DIFFERENT'} outputs "
                  f"({len(outputs[0])} files each)", dt)
