"""Naming estimation, system classification, Bayes listener and communication cost."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import NamingDistribution, NeedPrior, NumeralSystem
from .neural import AgentNet, forward, sample_mask


class SystemKind(enum.Enum):
    EXACT = "exact"
    APPROXIMATE = "approximate"


@dataclass(frozen=True, eq=False)
class ListenerPosterior:
    """L_w(n); rows of unreachable words are all zero and flagged."""

    rows: np.ndarray
    reachable: np.ndarray
    word_marginal: np.ndarray

    def reachable_rows(self) -> np.ndarray:
        return self.rows[self.reachable]


@dataclass(frozen=True)
class CostReport:
    cost_bits: float
    term_count: int
    kind: SystemKind


def estimate_naming(sender: AgentNet, rng, m: int = 1000, chunk: int = 200) -> NamingDistribution:
    """Monte-Carlo p(w|n): m Thompson-sampled sender choices per number, no updates."""
    if m < 1:
        raise ValueError("m must be >= 1")
    counts = np.zeros((sender.n_in, sender.n_out))
    for x in range(sender.n_in):
        done = 0
        while done < m:
            b = min(chunk, m - done)
            masks = sample_mask(sender.keep_prob, rng, (b, sender.hidden))
            words = forward(sender, np.full(b, x), masks).argmax(axis=1)
            counts[x] += np.bincount(words, minlength=sender.n_out)
            done += b
    return NamingDistribution(counts / m)


def classify(naming: NamingDistribution, threshold: float = 0.90) -> SystemKind:
    peaked = naming.rows.max(axis=1) > threshold
    return SystemKind.EXACT if bool(np.all(peaked)) else SystemKind.APPROXIMATE


def mode_system(naming: NamingDistribution) -> NumeralSystem:
    return NumeralSystem(naming.rows.argmax(axis=1))


def listener_posterior(naming: NamingDistribution, prior: NeedPrior) -> ListenerPosterior:
    """Bayes listener, normalized over numbers for each word."""
    joint = (naming.rows * prior.probs[:, None]).T  # words x numbers
    marginal = joint.sum(axis=1)
    reachable = marginal > 0
    rows = np.zeros_like(joint)
    rows[reachable] = joint[reachable] / marginal[reachable, None]
    return ListenerPosterior(rows, reachable, marginal)


def comm_cost_bits(naming: NamingDistribution, prior: NeedPrior, base: float = 2.0) -> float:
    """Expected surprisal -sum p(w|n) p(n) log L_w(n)."""
    post = listener_posterior(naming, prior)
    joint = (naming.rows * prior.probs[:, None]).T
    mask = joint > 0
    return max(float(-(joint[mask] * np.log(post.rows[mask])).sum() / np.log(base)), 0.0)


def comm_cost(naming: NamingDistribution, prior: NeedPrior, base: float = 2.0,
              threshold: float = 0.90) -> CostReport:
    marginal = (naming.rows * prior.probs[:, None]).sum(axis=0)
    return CostReport(
        cost_bits=comm_cost_bits(naming, prior, base),
        term_count=int((marginal > 0).sum()),
        kind=classify(naming, threshold),
    )


def partition_cost(assignment, prior_probs, base: float = 2.0) -> float:
    """Cost of a deterministic naming: H(N) - H(W), the cell decomposition."""
    a = np.asarray(assignment)
    p = np.asarray(prior_probs, dtype=np.float64)
    masses = np.bincount(a, weights=p)
    nz_p = p[p > 0]
    nz_m = masses[masses > 0]
    return max(float((-(nz_p * np.log(nz_p)).sum() + (nz_m * np.log(nz_m)).sum()) / np.log(base)), 0.0)
