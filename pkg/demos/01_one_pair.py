# %% [markdown]
# One sender-listener pair learns to name the numbers 1..20 with 10 words.
# The sender picks a word by Thompson sampling (a fresh dropout mask per
# decision), the listener guesses a number the same way, and both regress
# the value of what they did onto the shared reward.

# %%
import numpy as np

from emergent_numerals.analysis import comm_cost, estimate_naming, mode_system
from emergent_numerals.frontier import Mode, optimize_exact
from emergent_numerals.game import GameConfig, train_pair
from emergent_numerals.runner import resolve_prior

UPDATES = 3000  # 10000 in the full setting
prior = resolve_prior("powerlaw")
print("need prior p(n), first five:", np.round(prior.probs[:5], 3))

# %%
config = GameConfig(prior=prior, reward_kind="exp", updates=UPDATES, seed=3)
pair = train_pair(config)
trace = pair.reward_trace
print(f"mean reward: first 100 updates {trace[:100].mean():.3f}, last 100 {trace[-100:].mean():.3f}")

# %% [markdown]
# Run the trained sender many times per number (no learning) to get p(w|n).

# %%
naming = estimate_naming(pair.sender, np.random.default_rng(0), m=1000)
system = mode_system(naming).canonical()
report = comm_cost(naming, prior)
print("mode system (word per number):", system.assignment.tolist())
print(f"{report.term_count} terms, {report.kind.value}, cost {report.cost_bits:.3f} bits")

# %% [markdown]
# How close is that to the cheapest exact system with the same number of terms?

# %%
best = optimize_exact(report.term_count, prior, Mode.BEST, restarts=200, rng=1)
worst = optimize_exact(report.term_count, prior, Mode.WORST, restarts=200, rng=1)
print(f"exact envelope at k={report.term_count}: best {best.cost_bits:.3f}, worst {worst.cost_bits:.3f}")
print("best system:", best.system.assignment.tolist())
