"""Command line entry point: ``emergent-numerals <subcommand> ...``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import runner
from .core import NumberLine
from .humans import data_path, load_human_systems, universal_cap
from .priors import FrequencyTable, fit_power_law, uniform_prior


def _train_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with experiment settings; flags override it")
    p.add_argument("--reward", choices=["linear", "inverse", "exp"])
    p.add_argument("--prior", help="uniform | powerlaw[:FILE] | cap[:FILE] | maxent[:FILE] | vector:p1,...")
    p.add_argument("--pairs", type=int)
    p.add_argument("--updates", type=int)
    p.add_argument("--batch", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--workers", type=int)
    p.add_argument("--dropout", type=float)
    p.add_argument("--lr", type=float)
    p.add_argument("--hidden", type=int)
    p.add_argument("--vocab", type=int)
    p.add_argument("--init-scale", dest="init_scale", type=float)
    p.add_argument("--samples", dest="naming_samples", type=int, help="Monte-Carlo rounds per number")
    p.add_argument("--threshold", type=float, help="peakedness threshold for exact systems")
    p.add_argument("--save-nets", dest="save_nets", action="store_true", default=None)


def _spec(args) -> runner.ExperimentSpec:
    keys = ["reward", "prior", "pairs", "updates", "batch", "seed", "out", "workers", "dropout",
            "lr", "hidden", "vocab", "init_scale", "naming_samples", "threshold", "save_nets"]
    overrides = {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}
    if args.config:
        return runner.ExperimentSpec.from_file(args.config, **overrides)
    return runner.ExperimentSpec(**overrides)


def cmd_train(args):
    out = runner.run_experiment(_spec(args))
    print(out)


def cmd_frontier(args):
    prior = runner.resolve_prior(args.prior)
    kinds = ("exact", "approximate") if args.kind == "both" else (args.kind,)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    runner.frontier_table(prior, out, args.restarts, args.max_terms, kinds, args.seed)
    print(out)


def cmd_priors(args):
    line = NumberLine()
    fit = fit_power_law(FrequencyTable.from_csv(args.counts or data_path("english_numeral_counts.csv")), line)
    cap = universal_cap(load_human_systems(args.humans), line)
    maxent = runner.resolve_prior(f"maxent:{args.maxent}" if args.maxent else "maxent", line)
    columns = {"uniform": uniform_prior(line), "powerlaw": fit.prior, "cap": cap, "maxent": maxent}
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    runner.write_csv(out, ["n", *columns],
                     [[int(n)] + [runner.fmt(p.probs[i]) for p in columns.values()]
                      for i, n in enumerate(line.numbers)])
    print(f"power-law exponent {fit.alpha:.4f}")
    print(out)


def cmd_analyze(args):
    runner.analyze_results(args.dir, args.humans)


def cmd_consensus(args):
    runner.consensus_results(args.dir, args.restarts, args.seed)


def cmd_weber(args):
    pooled = runner.weber_results(args.dir, standard=args.standard)
    print(f"best nu {pooled.nu:.2f}  mse {pooled.mse_mean:.4f} +- {pooled.mse_std:.4f}")


def cmd_plot(args):
    from .plots import emit_plots

    for path in emit_plots(args.dir, args.envelope):
        print(path)


def cmd_all(args):
    from .plots import emit_plots

    spec = _spec(args)
    out = runner.run_experiment(spec)
    runner.frontier_table(runner.load_prior(out), out / "envelope.csv", args.restarts,
                          seed=spec.seed)
    runner.analyze_results(out)
    runner.consensus_results(out, seed=spec.seed)
    runner.weber_results(out)
    emit_plots(out)
    print(out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="emergent-numerals", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train sender-listener pairs")
    _train_args(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("frontier", help="best/worst hypothetical systems per term count")
    p.add_argument("--prior", default="powerlaw")
    p.add_argument("--restarts", type=int, default=1000)
    p.add_argument("--max-terms", dest="max_terms", type=int)
    p.add_argument("--kind", choices=["exact", "approximate", "both"], default="both")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="envelope.csv")
    p.set_defaults(func=cmd_frontier)

    p = sub.add_parser("priors", help="tabulate the four need priors")
    p.add_argument("--counts", help="n,count CSV for the power-law fit")
    p.add_argument("--humans", help="human systems file for the universal CAP")
    p.add_argument("--maxent", help="term,frequency CSV for the MaxEnt prior")
    p.add_argument("--out", default="priors.csv")
    p.set_defaults(func=cmd_priors)

    p = sub.add_parser("analyze", help="recompute costs and term usage of a results directory")
    p.add_argument("dir")
    p.add_argument("--humans")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("consensus", help="correlation-clustering consensus per term count")
    p.add_argument("dir")
    p.add_argument("--restarts", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_consensus)

    p = sub.add_parser("weber", help="fit Weber fractions to the Bayes listeners")
    p.add_argument("dir")
    p.add_argument("--standard", action="store_true", help="use the standard Gaussian exponent")
    p.set_defaults(func=cmd_weber)

    p = sub.add_parser("plot", help="write SVG figures")
    p.add_argument("dir")
    p.add_argument("--envelope", help="envelope CSV (default DIR/envelope.csv)")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("all", help="train, then run every analysis step into the same directory")
    _train_args(p)
    p.add_argument("--restarts", type=int, default=1000, help="frontier restarts")
    p.set_defaults(func=cmd_all)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
