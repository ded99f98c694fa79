# %% [markdown]
# Best and worst hypothetical numeral systems per term count, for exact
# partitions and for Gaussian (approximate) words, under the power-law prior.
# Writes frontier.svg next to this script.

# %%
from pathlib import Path

from matplotlib.figure import Figure

from emergent_numerals.frontier import approx_frontier, build_envelope, exact_frontier
from emergent_numerals.runner import resolve_prior

RESTARTS = 100  # 1000 in the full setting
prior = resolve_prior("powerlaw")
points = exact_frontier(prior, restarts=RESTARTS, rng=0)
points += approx_frontier(prior, max_terms=10, restarts=RESTARTS // 10, rng=0)
env = build_envelope(points)

# %%
print("kind         k   best   worst")
for (kind, k), (best, worst) in env.items():
    print(f"{kind:<12} {k:2d}  {best:.3f}  {worst:.3f}")

# %%
fig = Figure(figsize=(5, 4))
ax = fig.add_subplot()
for kind, style in (("exact", "-"), ("approximate", "--")):
    ks = sorted(k for kk, k in env if kk == kind)
    ax.plot(ks, [env[(kind, k)][0] for k in ks], style, color="black", label=f"{kind} best")
    ax.plot(ks, [env[(kind, k)][1] for k in ks], style, color="grey", label=f"{kind} worst")
ax.set_xlabel("number of terms")
ax.set_ylabel("communication cost (bits)")
ax.legend(fontsize=7)
out = Path(__file__).with_name("frontier.svg")
fig.savefig(out, format="svg", metadata={"Date": None})
print("wrote", out)
