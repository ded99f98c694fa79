# %% [markdown]
# A small population of pairs, end to end: training, term usage, consensus
# systems and the Weber fraction of the listeners.  The same steps run from
# the command line with `emergent-numerals all`.

# %%
import tempfile
from pathlib import Path

from emergent_numerals import runner
from emergent_numerals.plots import emit_plots

out = Path(tempfile.mkdtemp(prefix="numerals-"))
spec = runner.ExperimentSpec(reward="linear", prior="powerlaw", pairs=6, updates=2000,
                             seed=11, out=str(out))
runner.run_experiment(spec)
for row in runner.read_csv(out / "results.csv"):
    print(row)

# %%
runner.frontier_table(runner.load_prior(out), out / "envelope.csv", restarts=100, kinds=("exact",))
runner.analyze_results(out)
print("term histogram:", runner.read_csv(out / "term_hist.csv"))

# %% [markdown]
# Consensus: one agreement matrix per mode term count, clustered.

# %%
runner.consensus_results(out, restarts=50)
for row in runner.read_csv(out / "consensus_groups.csv"):
    print(f"{row['pairs']} pairs with {row['group_terms']} terms -> consensus {row['system']}")

# %%
pooled = runner.weber_results(out)
print(f"pooled Weber fraction {pooled.nu:.2f}, MSE {pooled.mse_mean:.4f} +- {pooled.mse_std:.4f}")
for path in emit_plots(out):
    print("figure:", path)
