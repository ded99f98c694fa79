# %% [markdown]
# Four need priors over 1..20: uniform, a power law fitted to numeral
# frequencies, the average capacity-achieving prior of human exact systems,
# and the maximum-entropy prior matching one language's word frequencies.

# %%
import numpy as np

from emergent_numerals.core import NamingDistribution
from emergent_numerals.humans import data_path, load_human_systems, universal_cap
from emergent_numerals.priors import (FrequencyTable, blahut_arimoto_cap, fit_power_law,
                                      maxent_prior, uniform_prior)
from emergent_numerals.runner import resolve_prior

# %%
fit = fit_power_law(FrequencyTable.from_csv(data_path("english_numeral_counts.csv")))
print(f"power law: p(n) ~ n^-{fit.alpha:.3f}")

# %% [markdown]
# Capacity of a deterministic two-cell channel is one bit, and the
# Blahut-Arimoto iteration splits mass evenly inside each cell.

# %%
two = NamingDistribution.from_assignment([0] * 10 + [1] * 10)
cap = blahut_arimoto_cap(two)
print(f"two-cell capacity {cap.capacity_bits:.6f} bits after {cap.iterations} iterations")

# %%
systems = load_human_systems()
print(f"{sum(s.kind == 'exact' for s in systems)} exact systems feed the universal CAP")
priors = {
    "uniform": uniform_prior(),
    "powerlaw": fit.prior,
    "cap": universal_cap(systems),
    "maxent": resolve_prior("maxent"),
}
print("n   " + "  ".join(f"{k:>8}" for k in priors))
for i in range(20):
    print(f"{i + 1:<3} " + "  ".join(f"{p.probs[i]:8.4f}" for p in priors.values()))
print("entropy (bits):", {k: round(p.entropy(), 3) for k, p in priors.items()})

# %% [markdown]
# Max-entropy with a deterministic partition is uniform inside each cell.

# %%
res = maxent_prior(NamingDistribution.from_assignment([0] * 3 + [1] * 17), [0.7, 0.3])
print(np.round(res.prior.probs, 4))
