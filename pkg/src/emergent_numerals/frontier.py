"""Best- and worst-cost hypothetical numeral systems per term count.

Exact systems are searched over arbitrary assignments of numbers to words
with single-number moves.  For a deterministic naming the cost is
``H(N) - H(W)``, so a move only changes two cell masses and its effect is
computed in closed form for all candidate moves at once.

Approximate systems place each word as a Gaussian on a grid of means and
move one mean at a time.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .analysis import partition_cost
from .core import DomainError, NeedPrior, NumberLine, NumeralSystem, entropy
from .priors import log_gaussian_rows

DELTA = 1e-12
LN2 = np.log(2.0)


class Mode(enum.Enum):
    BEST = "best"
    WORST = "worst"


@dataclass(frozen=True, eq=False)
class FrontierPoint:
    terms: int
    cost_bits: float
    mode: Mode
    kind: str  # "exact" or "approximate"
    system: NumeralSystem | None = None
    means: np.ndarray | None = None


def _xlogx(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = x[pos] * np.log(x[pos])
    return out


def _random_surjection(n: int, k: int, rng) -> np.ndarray:
    a = rng.integers(k, size=n)
    a[rng.permutation(n)[:k]] = np.arange(k)
    return a


def hill_climb_exact(assignment, probs, k: int, mode: Mode = Mode.BEST, delta: float = DELTA):
    """Steepest single-number moves until no move changes cost by more than ``delta``.

    Returns (assignment, cost_bits, steps).
    """
    a = np.array(assignment, dtype=int)
    p = np.asarray(probs, dtype=np.float64)
    n = a.size
    sign = 1.0 if mode is Mode.BEST else -1.0
    masses = np.bincount(a, weights=p, minlength=k)
    sizes = np.bincount(a, minlength=k)
    rows = np.arange(n)
    steps = 0
    while True:
        m_from = masses[a]
        # delta of sum x ln x for moving number i from its cell to cell b, in bits
        d_from = _xlogx(m_from - p) - _xlogx(m_from)
        d_to = _xlogx(masses[None, :] + p[:, None]) - _xlogx(masses)[None, :]
        change = (d_from[:, None] + d_to) / LN2 * sign
        change[rows, a] = np.inf
        change[sizes[a] <= 1, :] = np.inf  # keep every word in use
        i, b = np.unravel_index(np.argmin(change), change.shape)
        if not change[i, b] < -delta:
            break
        old = a[i]
        masses[old] -= p[i]
        masses[b] += p[i]
        sizes[old] -= 1
        sizes[b] += 1
        a[i] = b
        steps += 1
    return a, partition_cost(a, p), steps


def _better(c_new, c_old, mode):
    return c_new < c_old if mode is Mode.BEST else c_new > c_old


def optimize_exact(k: int, prior: NeedPrior, mode=Mode.BEST, restarts: int = 1000,
                   rng=None, starts=()) -> FrontierPoint:
    """Extreme local optimum over ``restarts`` random surjective starts.

    ``starts`` are extra initial assignments (e.g. splits of a (k-1)-optimum).
    """
    mode = Mode(mode)
    p = prior.probs
    n = p.size
    if not 1 <= k <= n:
        raise DomainError(f"term count {k} outside [1, {n}]")
    rng = np.random.default_rng(rng)
    inits = [_random_surjection(n, k, rng) for _ in range(restarts)] + [np.asarray(s) for s in starts]
    best_a, best_c = None, None
    for a0 in inits:
        a, c, _ = hill_climb_exact(a0, p, k, mode)
        if best_c is None or _better(c, best_c, mode):
            best_a, best_c = a, c
    system = NumeralSystem(best_a).canonical()
    return FrontierPoint(k, best_c, mode, "exact", system=system)


def _split_starts(system: NumeralSystem):
    """Every way of moving one number of a non-singleton cell into a new word."""
    a = system.assignment
    k = system.term_count
    sizes = np.bincount(a, minlength=k)
    out = []
    for i in range(a.size):
        if sizes[a[i]] > 1:
            s = a.copy()
            s[i] = k
            out.append(s)
    return out


def exact_frontier(prior: NeedPrior, max_terms: int | None = None, restarts: int = 1000,
                   rng=None, modes=(Mode.BEST, Mode.WORST)) -> list[FrontierPoint]:
    """Best/worst exact points for k = 1..max_terms.

    Best-mode runs at k also start from all single splits of the (k-1)-optimum,
    which makes the best curve non-increasing in k.
    """
    rng = np.random.default_rng(rng)
    n = len(prior)
    max_terms = n if max_terms is None else max_terms
    points = []
    for mode in modes:
        mode = Mode(mode)
        prev = None
        for k in range(1, max_terms + 1):
            starts = _split_starts(prev.system) if (mode is Mode.BEST and prev is not None) else ()
            pt = optimize_exact(k, prior, mode, restarts, rng, starts)
            points.append(pt)
            prev = pt
    return points


def exhaustive_exact(k: int, probs, mode=Mode.BEST):
    """Brute force over all k**n assignments using exactly k words (oracle)."""
    mode = Mode(mode)
    p = np.asarray(probs, dtype=np.float64)
    n = p.size
    grid = np.indices((k,) * n).reshape(n, -1).T
    used = np.array([np.unique(r).size for r in grid])
    grid = grid[used == k]
    masses = np.zeros((grid.shape[0], k))
    for w in range(k):
        masses[:, w] = (grid == w) @ p
    costs = (entropy(p) * LN2 + _xlogx(masses).sum(axis=1)) / LN2
    i = np.argmin(costs) if mode is Mode.BEST else np.argmax(costs)
    return grid[i], float(costs[i])


# ---------------------------------------------------------------- approximate

MEAN_GRID = np.arange(1.0, 20.0 + 0.25, 0.5)


def soft_cost_bits(log_weights, probs) -> np.ndarray:
    """Cost of namings p(w|n) = softmax_w(log_weights[..., w, n]) under prior probs.

    ``log_weights`` has shape (..., k, n); returns an array of shape (...).
    """
    lw = log_weights - log_weights.max(axis=-2, keepdims=True)
    naming = np.exp(lw)
    naming /= naming.sum(axis=-2, keepdims=True)
    joint = naming * probs
    marg = joint.sum(axis=-1)
    return np.maximum((_xlogx(marg).sum(axis=-1) - _xlogx(joint).sum(axis=(-2, -1))) / LN2, 0.0)


def approx_naming_rows(means, weber: float = 0.31, line: NumberLine = NumberLine()):
    lw = log_gaussian_rows(np.asarray(means, dtype=np.float64), weber, line)
    lw = lw - lw.max(axis=0, keepdims=True)
    w = np.exp(lw)
    return (w / w.sum(axis=0, keepdims=True)).T


def replacement_costs(idx, probs, table) -> np.ndarray:
    """Cost in bits of every single-mean replacement: out[w, g] swaps word w's row for table[g].

    Evaluated from leave-one-out sums, so a full sweep costs O(k^2 G |N|)
    as a batched matmul instead of materializing k*G candidate namings.
    """
    L = table[idx]  # (k, n)
    k, n = L.shape
    others = ~np.eye(k, dtype=bool)  # others[w, v]: v != w
    Lo = np.where(others[:, :, None], L[None], -np.inf)  # (w, v, n)
    c = Lo.max(axis=1)  # (w, n); -inf when k == 1
    with np.errstate(invalid="ignore"):
        E = np.where(others[:, :, None], np.exp(Lo - np.where(np.isfinite(c), c, 0.0)[:, None]), 0.0)
    S = E.sum(axis=1)  # (w, n)
    P = (E * np.where(others[:, :, None], L[None], 0.0)).sum(axis=1)
    T = table[None]  # (1, G, n)
    m = np.maximum(c[:, None], T)  # (w, G, n)
    a = np.exp(c[:, None] - m)  # weight of the kept words
    b = np.exp(T - m)  # weight of the new row
    denom = S[:, None] * a + b
    qlogq = (P[:, None] * a + b * T) / denom - m - np.log(denom)  # sum_v q_v log q_v
    joint_ent = -(probs * (np.log(probs, where=probs > 0, out=np.zeros_like(probs)) + qlogq)).sum(-1)
    scale = probs * a / denom  # p(n) exp(c_w - Z) for the kept words
    marg = np.einsum("wvn,wgn->wgv", E, scale)
    moved = (probs * b / denom).sum(-1)
    marg[np.arange(k), :, np.arange(k)] = moved
    word_ent = -_xlogx(marg).sum(-1)
    return np.maximum((joint_ent - word_ent) / LN2, 0.0)


def hill_climb_approx(mean_idx, probs, table, mode: Mode = Mode.BEST, delta: float = DELTA):
    """Move one mean at a time to any free grid value while the cost strictly improves.

    ``table`` holds log Gaussian rows, one per grid mean.  Means stay
    distinct: a grid point already used by another word is not a candidate.
    """
    idx = np.array(mean_idx, dtype=int)
    sign = 1.0 if mode is Mode.BEST else -1.0
    current = soft_cost_bits(table[idx], probs)
    steps = 0
    while True:
        costs = replacement_costs(idx, probs, table)
        change = (costs - current) * sign
        change[:, idx] = np.inf
        w, g = np.unravel_index(np.argmin(change), change.shape)
        if not change[w, g] < -delta:
            break
        idx[w] = g
        current = costs[w, g]
        steps += 1
    return idx, float(current), steps


def optimize_approx(k: int, prior: NeedPrior, mode=Mode.BEST, restarts: int = 1000,
                    weber: float = 0.31, rng=None, line: NumberLine = NumberLine(),
                    grid=MEAN_GRID) -> FrontierPoint:
    mode = Mode(mode)
    if not 1 <= k <= min(line.size, len(grid)):
        raise DomainError(f"term count {k} outside [1, {line.size}]")
    rng = np.random.default_rng(rng)
    table = log_gaussian_rows(np.asarray(grid), weber, line)
    best_idx, best_c = None, None
    for _ in range(restarts):
        idx0 = rng.choice(len(grid), size=k, replace=False)
        idx, c, _ = hill_climb_approx(idx0, prior.probs, table, mode)
        if best_c is None or _better(c, best_c, mode):
            best_idx, best_c = idx, c
    return FrontierPoint(k, best_c, mode, "approximate", means=np.sort(np.asarray(grid)[best_idx]))


def approx_frontier(prior: NeedPrior, max_terms: int | None = None, restarts: int = 1000,
                    weber: float = 0.31, rng=None, modes=(Mode.BEST, Mode.WORST)):
    rng = np.random.default_rng(rng)
    max_terms = len(prior) if max_terms is None else max_terms
    return [optimize_approx(k, prior, m, restarts, weber, rng)
            for m in modes for k in range(1, max_terms + 1)]


# ------------------------------------------------------------------ envelope

def build_envelope(points, monotone: bool = False) -> dict:
    """{(kind, terms): (best_cost, worst_cost)} taking extremes over duplicates.

    With ``monotone`` the best curve of each kind is replaced by its running
    minimum over smaller term counts (splitting a cell never raises cost).
    """
    table: dict = {}
    for pt in points:
        best, worst = table.get((pt.kind, pt.terms), (np.nan, np.nan))
        if pt.mode is Mode.BEST:
            best = pt.cost_bits if np.isnan(best) else min(best, pt.cost_bits)
        else:
            worst = pt.cost_bits if np.isnan(worst) else max(worst, pt.cost_bits)
        table[(pt.kind, pt.terms)] = (best, worst)
    if monotone:
        for kind in {k for k, _ in table}:
            run = np.inf
            for terms in sorted(t for kk, t in table if kk == kind):
                best, worst = table[(kind, terms)]
                if not np.isnan(best):
                    run = min(run, best)
                    table[(kind, terms)] = (run, worst)
    return dict(sorted(table.items()))
