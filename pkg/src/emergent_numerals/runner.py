"""Experiment orchestration: prior resolution, parallel pair training and result tables.

Directory layout written by :func:`run_experiment`::

    OUT/config.json          resolved experiment settings
    OUT/prior.csv            n,p
    OUT/results.csv          pair_id,reward,prior,terms,kind,cost_bits
    OUT/modes.csv            pair_id,terms,system   (space-separated words for 1..N)
    OUT/term_hist.csv        terms,count,frequency
    OUT/failures.csv         pair_id,error
    OUT/pairs/pair_XXXXX/    naming.csv, trace.csv (update,mean_reward), manifest.json

Pair ``i`` is seeded with ``mix_seed(master_seed, i)`` so the output does
not depend on how many worker processes run the pairs.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .analysis import comm_cost, estimate_naming, mode_system
from .core import NamingDistribution, NeedPrior, NumberLine, RewardKind, Vocabulary
from .game import GameConfig, train_pair
from .humans import data_path, load_human_systems, maxent_prior_from_file, universal_cap
from .neural import save_net
from .priors import FrequencyTable, fit_power_law, uniform_prior

log = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def mix_seed(master_seed: int, index: int) -> int:
    """64-bit seed for pair ``index``: splitmix64 applied twice over (master, index)."""
    return splitmix64(splitmix64(master_seed & MASK64) ^ (index & MASK64))


# ------------------------------------------------------------------- priors

def resolve_prior(source: str, line: NumberLine = NumberLine()) -> NeedPrior:
    """Build a prior from ``uniform``, ``powerlaw[:FILE]``, ``cap[:FILE]``,
    ``maxent[:FILE]`` or ``vector:p1,p2,...``."""
    kind, _, arg = str(source).partition(":")
    kind = kind.strip().lower()
    if kind == "uniform":
        return uniform_prior(line)
    if kind == "powerlaw":
        path = arg or data_path("english_numeral_counts.csv")
        return fit_power_law(FrequencyTable.from_csv(path), line).prior
    if kind == "cap":
        systems = load_human_systems(arg or None)
        return universal_cap(systems, line)
    if kind == "maxent":
        return maxent_prior_from_file(arg or data_path("gooniyandi_word_freq.csv"), line)
    if kind == "vector":
        return NeedPrior.normalized([float(v) for v in arg.split(",")])
    raise ValueError(f"unknown prior source {source!r}")


# -------------------------------------------------------------- experiments

@dataclass
class ExperimentSpec:
    name: str = "experiment"
    reward: str = "linear"
    prior: str = "powerlaw"
    pairs: int = 30
    updates: int = 10_000
    batch: int = 100
    dropout: float = 0.3
    lr: float = 0.001
    hidden: int = 50
    vocab: int = 10
    init_scale: float = 1.0
    naming_samples: int = 1000
    threshold: float = 0.90
    seed: int = 0
    out: str = "results"
    workers: int = 1
    save_nets: bool = False
    line_hi: int = 20

    def __post_init__(self):
        if self.pairs < 1:
            raise ValueError("pairs must be >= 1")
        self.reward = RewardKind.parse(self.reward).value

    @classmethod
    def from_file(cls, path, **overrides) -> "ExperimentSpec":
        doc = json.loads(Path(path).read_text())
        doc.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**doc)

    @property
    def line(self) -> NumberLine:
        return NumberLine(1, self.line_hi)

    def game_config(self, prior: NeedPrior, seed: int) -> GameConfig:
        return GameConfig(prior=prior, reward_kind=self.reward, line=self.line,
                          vocab=Vocabulary(self.vocab), batch_size=self.batch,
                          updates=self.updates, dropout=self.dropout, lr=self.lr,
                          hidden=self.hidden, seed=seed, init_scale=self.init_scale)


@dataclass
class PairResult:
    pair_id: int
    seed: int
    naming_csv: str = ""
    trace: np.ndarray | None = None
    cost_bits: float = float("nan")
    terms: int = 0
    kind: str = ""
    mode: list = field(default_factory=list)
    error: str | None = None
    nets: tuple | None = None


def run_pair(spec: ExperimentSpec, prior: NeedPrior, pair_id: int) -> PairResult:
    seed = mix_seed(spec.seed, pair_id)
    try:
        rng = np.random.default_rng(seed)
        pair = train_pair(spec.game_config(prior, seed), rng)
        naming = estimate_naming(pair.sender, rng, m=spec.naming_samples)
        report = comm_cost(naming, prior, threshold=spec.threshold)
        return PairResult(pair_id, seed, naming.to_csv(), pair.reward_trace, report.cost_bits,
                          report.term_count, report.kind.value,
                          mode_system(naming).assignment.tolist(),
                          nets=(pair.sender, pair.listener) if spec.save_nets else None)
    except Exception:  # noqa: BLE001 - a failed pair is recorded and the run goes on
        return PairResult(pair_id, seed, error=traceback.format_exc(limit=3))


def _run_pair_job(args):
    return run_pair(*args)


def train_pairs(spec: ExperimentSpec, prior: NeedPrior) -> list[PairResult]:
    jobs = [(spec, prior, i) for i in range(spec.pairs)]
    if spec.workers <= 1:
        return [run_pair(*j) for j in jobs]
    with ProcessPoolExecutor(max_workers=spec.workers) as pool:
        return list(pool.map(_run_pair_job, jobs))


def fmt(x) -> str:
    return repr(float(x))


def write_csv(path, header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def read_csv(path) -> list[dict]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"missing table {path.name} in {path.parent}")
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def run_experiment(spec: ExperimentSpec, prior: NeedPrior | None = None) -> Path:
    out = Path(spec.out)
    out.mkdir(parents=True, exist_ok=True)
    prior = resolve_prior(spec.prior, spec.line) if prior is None else prior
    config = asdict(spec)
    config.pop("workers")
    config.pop("out")
    (out / "config.json").write_text(json.dumps(config, indent=2, sort_keys=True) + "\n")
    write_csv(out / "prior.csv", ["n", "p"],
              [[int(n), fmt(p)] for n, p in zip(spec.line.numbers, prior.probs)])

    results = train_pairs(spec, prior)
    ok = [r for r in results if r.error is None]
    for r in ok:
        pdir = out / "pairs" / f"pair_{r.pair_id:05d}"
        pdir.mkdir(parents=True, exist_ok=True)
        (pdir / "naming.csv").write_text(r.naming_csv)
        write_csv(pdir / "trace.csv", ["update", "mean_reward"],
                  [[t + 1, fmt(v)] for t, v in enumerate(r.trace)])
        manifest = {"pair_id": r.pair_id, "seed": r.seed, "reward": spec.reward,
                    "prior": spec.prior, "updates": spec.updates, "terms": r.terms,
                    "kind": r.kind, "cost_bits": r.cost_bits}
        (pdir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        if r.nets is not None:
            save_net(r.nets[0], pdir / "sender.json")
            save_net(r.nets[1], pdir / "listener.json")
    write_csv(out / "results.csv", ["pair_id", "reward", "prior", "terms", "kind", "cost_bits"],
              [[r.pair_id, spec.reward, spec.prior, r.terms, r.kind, fmt(r.cost_bits)] for r in ok])
    write_csv(out / "modes.csv", ["pair_id", "terms", "system"],
              [[r.pair_id, len(set(r.mode)), " ".join(map(str, r.mode))] for r in ok])
    write_term_histogram(out, [r.terms for r in ok])
    write_csv(out / "failures.csv", ["pair_id", "error"],
              [[r.pair_id, r.error] for r in results if r.error is not None])
    for r in results:
        if r.error is not None:
            log.error("pair %d failed:\n%s", r.pair_id, r.error)
    return out


def write_term_histogram(out, terms) -> None:
    terms = np.asarray(terms, dtype=int)
    rows = []
    if terms.size:
        counts = np.bincount(terms)
        rows = [[k, int(c), fmt(c / terms.size)] for k, c in enumerate(counts) if k >= 1 and c > 0]
    write_csv(Path(out) / "term_hist.csv", ["terms", "count", "frequency"], rows)


def load_config(results_dir) -> dict:
    return json.loads((Path(results_dir) / "config.json").read_text())


def load_prior(results_dir) -> NeedPrior:
    return NeedPrior.normalized([float(r["p"]) for r in read_csv(Path(results_dir) / "prior.csv")])


def load_namings(results_dir) -> dict:
    """{pair_id: NamingDistribution} for every pair directory."""
    out = {}
    for pdir in sorted((Path(results_dir) / "pairs").glob("pair_*")):
        out[int(pdir.name.split("_")[1])] = NamingDistribution.from_csv(pdir / "naming.csv")
    return out


def load_modes(results_dir) -> dict:
    return {int(r["pair_id"]): [int(w) for w in r["system"].split()]
            for r in read_csv(Path(results_dir) / "modes.csv")}


# ----------------------------------------------------------- post-processing

def analyze_results(results_dir, humans_path=None) -> Path:
    """Recompute results.csv and term_hist.csv from the stored namings; cost the human systems."""
    results_dir = Path(results_dir)
    cfg = load_config(results_dir)
    prior = load_prior(results_dir)
    rows, terms = [], []
    for pid, naming in load_namings(results_dir).items():
        rep = comm_cost(naming, prior, threshold=cfg.get("threshold", 0.90))
        rows.append([pid, cfg["reward"], cfg["prior"], rep.term_count, rep.kind.value, fmt(rep.cost_bits)])
        terms.append(rep.term_count)
    write_csv(results_dir / "results.csv", ["pair_id", "reward", "prior", "terms", "kind", "cost_bits"], rows)
    write_term_histogram(results_dir, terms)
    write_human_costs(results_dir / "humans.csv", prior, humans_path)
    return results_dir


def write_human_costs(path, prior: NeedPrior, humans_path=None) -> None:
    rows = []
    for system in load_human_systems(humans_path):
        rep = system.cost(prior)
        rows.append([system.language, system.kind, rep.term_count, fmt(rep.cost_bits)])
    write_csv(path, ["language", "kind", "terms", "cost_bits"], rows)


def frontier_table(prior: NeedPrior, out_path, restarts: int = 1000, max_terms: int | None = None,
                   kinds=("exact", "approximate"), seed: int = 0, weber: float = 0.31) -> Path:
    from .frontier import approx_frontier, build_envelope, exact_frontier

    rng = np.random.default_rng(mix_seed(seed, 0))
    points = []
    if "exact" in kinds:
        points += exact_frontier(prior, max_terms, restarts, rng)
    if "approximate" in kinds:
        points += approx_frontier(prior, max_terms, restarts, weber, rng)
    env = build_envelope(points)
    rows = [[terms, fmt(best), fmt(worst), kind] for (kind, terms), (best, worst) in env.items()]
    write_csv(out_path, ["terms", "best_cost", "worst_cost", "kind"], rows)
    return Path(out_path)


def consensus_results(results_dir, restarts: int = 50, seed: int = 0) -> Path:
    """Consensus system per mode term count, reported under its realized term count."""
    from .consensus import consensus_by_terms, correlation_cluster
    from .core import NumeralSystem

    results_dir = Path(results_dir)
    systems = [NumeralSystem(a) for _, a in sorted(load_modes(results_dir).items())]
    groups = consensus_by_terms(systems)
    sizes = {k: sum(s.term_count == k for s in systems) for k in groups}
    chosen: dict = {}
    group_rows = []
    for k, M in groups.items():
        cons = correlation_cluster(M, restarts, np.random.default_rng(mix_seed(seed, k)))
        realized = cons.term_count
        group_rows.append([k, sizes[k], realized, " ".join(map(str, cons.assignment.tolist()))])
        if realized not in chosen or sizes[k] > chosen[realized][0]:
            chosen[realized] = (sizes[k], cons)
    write_csv(results_dir / "consensus_groups.csv", ["group_terms", "pairs", "terms", "system"], group_rows)
    rows = []
    for terms in sorted(chosen):
        cons = chosen[terms][1]
        rows += [[terms, n + 1, int(w)] for n, w in enumerate(cons.assignment)]
    write_csv(results_dir / "consensus.csv", ["terms", "n", "word"], rows)
    return results_dir


def weber_results(results_dir, standard: bool = False):
    from .analysis import listener_posterior
    from .weberfit import fit_weber

    results_dir = Path(results_dir)
    cfg = load_config(results_dir)
    prior = load_prior(results_dir)
    namings = load_namings(results_dir)
    posts = [listener_posterior(nm, prior) for nm in namings.values()]
    pooled = fit_weber(posts, NumberLine(1, cfg.get("line_hi", 20)), standard=standard)
    rows = [[pid, cfg["reward"], fmt(f.nu), fmt(f.mse)]
            for pid, f in zip(namings, pooled.fits) if f is not None]
    write_csv(results_dir / "weber.csv", ["pair_id", "reward", "nu", "mse"], rows)
    write_csv(results_dir / "weber_summary.csv", ["reward", "nu", "mse_mean", "mse_std", "pairs"],
              [[cfg["reward"], fmt(pooled.nu), fmt(pooled.mse_mean), fmt(pooled.mse_std), len(rows)]])
    return pooled
