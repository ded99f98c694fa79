"""SVG figures from result tables: cost vs terms, term usage, consensus systems.

Output is byte-stable for fixed inputs: no timestamps, fixed id salt.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
import matplotlib.patches
import numpy as np
from matplotlib.figure import Figure

from .runner import read_csv

matplotlib.rcParams["svg.hashsalt"] = "emergent-numerals"
matplotlib.rcParams["svg.fonttype"] = "none"

PALETTE = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d",
           "#666666", "#1f78b4", "#b2df8a", "#fb9a99", "#cab2d6", "#ffff99", "#b15928",
           "#8dd3c7", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#fccde5"]


def _save(fig: Figure, path) -> Path:
    fig.savefig(path, format="svg", metadata={"Date": None})
    return Path(path)


def cost_figure(results, envelope, humans=()) -> Figure:
    """Communication cost against term count, with best/worst envelopes."""
    fig = Figure(figsize=(5, 4))
    ax = fig.add_subplot()
    for kind, style in (("exact", "-"), ("approximate", "--")):
        rows = sorted((int(r["terms"]), float(r["best_cost"]), float(r["worst_cost"]))
                      for r in envelope if r["kind"] == kind)
        if rows:
            t, best, worst = map(np.array, zip(*rows))
            ax.plot(t, best, style, color="black", lw=1, label=f"{kind} best", gid=f"{kind}-best")
            ax.plot(t, worst, style, color="grey", lw=1, label=f"{kind} worst", gid=f"{kind}-worst")
    if results:
        ax.scatter([int(r["terms"]) for r in results], [float(r["cost_bits"]) for r in results],
                   s=10, alpha=0.5, color=PALETTE[1], label="agents", gid="agents")
    if humans:
        ax.scatter([int(r["terms"]) for r in humans], [float(r["cost_bits"]) for r in humans],
                   marker="x", color=PALETTE[2], label="human systems", gid="humans")
    ax.set_xlabel("number of terms")
    ax.set_ylabel("communication cost (bits)")
    ax.legend(fontsize=7)
    return fig


def term_frequency_figure(hist) -> Figure:
    fig = Figure(figsize=(5, 3))
    ax = fig.add_subplot()
    if hist:
        ax.bar([int(r["terms"]) for r in hist], [float(r["frequency"]) for r in hist], color=PALETTE[0])
    ax.set_xlabel("number of terms")
    ax.set_ylabel("relative frequency")
    return fig


def consensus_figure(rows) -> Figure:
    """One horizontal strip per consensus system, one colored cell per number."""
    by_terms: dict = {}
    for r in rows:
        by_terms.setdefault(int(r["terms"]), []).append((int(r["n"]), int(r["word"])))
    fig = Figure(figsize=(6, 0.5 + 0.4 * max(len(by_terms), 1)))
    ax = fig.add_subplot()
    for y, terms in enumerate(sorted(by_terms)):
        for n, w in sorted(by_terms[terms]):
            ax.add_patch(matplotlib.patches.Rectangle((n - 0.5, y - 0.4), 1, 0.8,
                                                      color=PALETTE[w % len(PALETTE)]))
    ax.set_xlim(0.5, 20.5)
    ax.set_ylim(-0.6, max(len(by_terms), 1) - 0.4)
    ax.set_yticks(range(len(by_terms)), [f"{t} terms" for t in sorted(by_terms)])
    ax.set_xticks(range(1, 21))
    ax.set_xlabel("number")
    return fig


def emit_plots(results_dir, envelope_path=None) -> list[Path]:
    """Write cost_vs_terms.svg, term_frequency.svg and (if available) consensus.svg."""
    d = Path(results_dir)
    envelope = read_csv(envelope_path or d / "envelope.csv")
    results = read_csv(d / "results.csv")
    humans = read_csv(d / "humans.csv") if (d / "humans.csv").exists() else []
    out = [_save(cost_figure(results, envelope, humans), d / "cost_vs_terms.svg"),
           _save(term_frequency_figure(read_csv(d / "term_hist.csv")), d / "term_frequency.svg")]
    if (d / "consensus.csv").exists():
        out.append(_save(consensus_figure(read_csv(d / "consensus.csv")), d / "consensus.svg"))
    return out
