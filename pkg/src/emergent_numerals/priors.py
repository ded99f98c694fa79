"""Need priors: uniform, power-law smoothed corpus counts, capacity-achieving, maximum entropy."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import linprog
from scipy.special import logsumexp

from .core import DomainError, NamingDistribution, NeedPrior, NumberLine, entropy

log = logging.getLogger(__name__)


class FitError(ValueError):
    pass


class InfeasibleError(ValueError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (max residual {residual:.3g})")
        self.residual = residual


def uniform_prior(line: NumberLine = NumberLine()) -> NeedPrior:
    return NeedPrior(np.full(line.size, 1.0 / line.size))


# ------------------------------------------------------------------ power law

@dataclass(frozen=True)
class FrequencyTable:
    numbers: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        n = np.asarray(self.numbers, dtype=int)
        c = np.asarray(self.counts, dtype=np.float64)
        if n.shape != c.shape or np.unique(n).size != n.size:
            raise DomainError("frequency table needs distinct numbers, one count each")
        if np.any(c < 0):
            raise DomainError("counts must be non-negative")
        object.__setattr__(self, "numbers", n)
        object.__setattr__(self, "counts", c)

    @classmethod
    def from_csv(cls, path) -> "FrequencyTable":
        with open(path, newline="") as fh:
            rows = [r for r in csv.DictReader(_skip_comments(fh))]
        return cls([int(r["n"]) for r in rows], [float(r["count"]) for r in rows])


def _skip_comments(lines):
    return (line for line in lines if not line.lstrip().startswith("#"))


@dataclass(frozen=True)
class PowerLawFit:
    alpha: float
    intercept: float
    prior: NeedPrior


def fit_power_law(freqs: FrequencyTable, line: NumberLine = NumberLine()) -> PowerLawFit:
    """OLS fit of log frequency against log n, then n**-alpha normalized on the line."""
    keep = (freqs.counts > 0) & (freqs.numbers >= line.lo) & (freqs.numbers <= line.hi)
    if keep.sum() < 2:
        raise FitError("need at least two positive counts to fit a power law")
    x = np.log(freqs.numbers[keep].astype(np.float64))
    y = np.log(freqs.counts[keep] / freqs.counts[keep].sum())
    slope, intercept = np.polyfit(x, y, 1)
    alpha = -float(slope)
    weights = line.numbers.astype(np.float64) ** -alpha
    return PowerLawFit(alpha, float(intercept), NeedPrior.normalized(weights))


# ---------------------------------------------------------------------- CAP

@dataclass(frozen=True, eq=False)
class CapResult:
    prior: NeedPrior
    capacity_bits: float
    converged: bool
    iterations: int
    mi_trace: np.ndarray


def mutual_information_bits(prior_probs, channel_rows) -> float:
    p = np.asarray(prior_probs, dtype=np.float64)
    joint = p[:, None] * channel_rows
    return entropy(joint.sum(axis=0)) + entropy(p) - entropy(joint.ravel())


def blahut_arimoto_cap(channel: NamingDistribution, tol: float = 1e-10,
                       max_iter: int = 100_000) -> CapResult:
    """Capacity-achieving input distribution of the channel p(w|n).

    Iterates from the uniform input until the gap between the upper bound
    max_n D(p(.|n) || q) and the lower bound log sum_n r(n) exp(D_n) is below
    ``tol`` (in bits).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    P = channel.rows
    n = P.shape[0]
    r = np.full(n, 1.0 / n)
    logP = np.where(P > 0, np.log(np.where(P > 0, P, 1.0)), 0.0)
    trace = []
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        q = r @ P
        logq = np.log(np.where(q > 0, q, 1.0))
        D = (P * (logP - logq)).sum(axis=1)
        lower = logsumexp(D, b=r)
        upper = D.max()
        trace.append(lower / np.log(2))
        if (upper - lower) / np.log(2) < tol:
            converged = True
            break
        r = r * np.exp(D - upper)
        r /= r.sum()
    if not converged:
        log.warning("Blahut-Arimoto stopped after %d iterations without converging", it)
    prior = NeedPrior(r / r.sum())
    return CapResult(prior, mutual_information_bits(prior.probs, P), converged, it, np.array(trace))


def average_caps(caps) -> NeedPrior:
    caps = list(caps)
    if not caps:
        raise ValueError("no priors to average")
    stacked = np.stack([np.asarray(getattr(c, "probs", c), dtype=np.float64) for c in caps])
    return NeedPrior.normalized(stacked.mean(axis=0))


# ------------------------------------------------------------------- MaxEnt

@dataclass(frozen=True, eq=False)
class MaxEntResult:
    prior: NeedPrior
    multipliers: np.ndarray
    residual: float
    iterations: int


def min_constraint_residual(naming: NamingDistribution, word_freq) -> float:
    """Smallest achievable max |sum_n p(n) p(w|n) - p(w)| over priors p (an LP)."""
    A = naming.rows.T
    b = np.asarray(word_freq, dtype=np.float64)
    k, n = A.shape
    # variables: p (n), t
    c = np.zeros(n + 1)
    c[-1] = 1.0
    A_ub = np.block([[A, -np.ones((k, 1))], [-A, -np.ones((k, 1))]])
    b_ub = np.concatenate([b, -b])
    A_eq = np.concatenate([np.ones(n), [0.0]])[None, :]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0],
                  bounds=[(0, None)] * (n + 1), method="highs")
    return float(res.fun)


def maxent_prior(naming: NamingDistribution, word_freq, tol: float = 1e-10,
                 max_iter: int = 500) -> MaxEntResult:
    """Maximum-entropy p(n) with sum_n p(n) p(w|n) = p(w) for every word.

    Solved in the dual: p(n) proportional to exp(sum_w lam_w p(w|n)); lam starts
    at zero and takes damped Newton steps with step halving on the dual objective.
    """
    A = naming.rows.T  # words x numbers
    b = np.asarray(word_freq, dtype=np.float64)
    if b.shape != (A.shape[0],):
        raise DomainError("one word frequency per naming column required")
    if abs(b.sum() - 1.0) > 1e-9 or np.any(b < 0):
        raise DomainError("word frequencies must form a distribution")
    gap = min_constraint_residual(naming, b)
    if gap > tol:
        raise InfeasibleError("word frequencies are not reachable by any prior", gap)

    def dual(lam):
        s = lam @ A
        return logsumexp(s) - lam @ b, s

    lam = np.zeros(A.shape[0])
    f, s = dual(lam)
    it = 0
    for it in range(1, max_iter + 1):
        p = np.exp(s - logsumexp(s))
        grad = A @ p - b
        res = np.abs(grad).max()
        if res < tol:
            break
        Ap = A * p
        H = Ap @ A.T - np.outer(A @ p, A @ p)
        step = -np.linalg.lstsq(H, grad, rcond=1e-12)[0]
        if not np.all(np.isfinite(step)) or grad @ step >= 0:
            step = -grad
        t = 1.0
        while t > 1e-12:
            f_new, s_new = dual(lam + t * step)
            if f_new <= f + 1e-4 * t * (grad @ step):
                break
            t *= 0.5
        lam = lam + t * step
        f, s = f_new, s_new
    p = np.exp(s - logsumexp(s))
    res = float(np.abs(A @ p - b).max())
    if res > tol:
        raise InfeasibleError("dual ascent did not reach the constraints", res)
    return MaxEntResult(NeedPrior.normalized(p), lam, res, it)


# ----------------------------------------------------------------- Gaussians

def log_gaussian_rows(means, weber: float, line: NumberLine = NumberLine()) -> np.ndarray:
    """log p(n | word) for Gaussian words with sigma = weber * mean, normalized on the line."""
    means = np.atleast_1d(np.asarray(means, dtype=np.float64))
    if np.any(means <= 0) or weber <= 0:
        raise DomainError("Gaussian words need positive mean and Weber fraction")
    n = line.numbers.astype(np.float64)
    sigma = weber * means[:, None]
    logits = -((n[None, :] - means[:, None]) ** 2) / (2.0 * sigma ** 2)
    return logits - logsumexp(logits, axis=1, keepdims=True)


def gaussian_word_row(mu: float, weber: float = 0.31, line: NumberLine = NumberLine()) -> np.ndarray:
    return np.exp(log_gaussian_rows([mu], weber, line)[0])
