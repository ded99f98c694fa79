"""Consensus numeral systems by correlation clustering of co-assignment votes."""

from __future__ import annotations

import numpy as np

from .core import DomainError, NumeralSystem


def empty_agreement(n: int = 20) -> np.ndarray:
    return np.zeros((n, n), dtype=np.int64)


def accumulate(M, system: NumeralSystem) -> np.ndarray:
    """+1 for every pair of numbers named by the same word, -1 otherwise."""
    M = np.asarray(M)
    a = system.assignment if isinstance(system, NumeralSystem) else np.asarray(system)
    if M.shape != (a.size, a.size):
        raise DomainError(f"agreement matrix {M.shape} does not match a system over {a.size} numbers")
    same = a[:, None] == a[None, :]
    return M + np.where(same, 1, -1)


def agreement_matrix(systems, n: int | None = None) -> np.ndarray:
    systems = list(systems)
    if n is None:
        n = len(systems[0])
    M = empty_agreement(n)
    for s in systems:
        M = accumulate(M, s)
    return M


def objective(M, labels) -> int:
    """Within-cluster agreement minus between-cluster agreement over pairs i < j."""
    M = np.asarray(M)
    labels = np.asarray(labels)
    same = labels[:, None] == labels[None, :]
    iu = np.triu_indices(labels.size, 1)
    w = M[iu]
    s = same[iu]
    return int(w[s].sum() - w[~s].sum())


def _canonical(labels) -> np.ndarray:
    return NumeralSystem(labels).canonical().assignment.copy()


def _best_relocation(M, labels):
    n = labels.size
    k = labels.max() + 1
    onehot = np.zeros((n, k + 1))
    onehot[np.arange(n), labels] = 1.0
    offdiag = M - np.diag(np.diag(M))
    affinity = offdiag @ onehot  # affinity[i, c] = sum_{j in c, j != i} M_ij
    own = affinity[np.arange(n), labels]
    gain = 2 * (affinity - own[:, None])
    gain[np.arange(n), labels] = -np.inf
    sizes = np.bincount(labels, minlength=k + 1)
    gain[sizes[labels] == 1, k] = -np.inf  # singleton to a new cluster is a no-op
    i, c = np.unravel_index(np.argmax(gain), gain.shape)
    return gain[i, c], ("move", i, c)


def _best_merge(M, labels):
    k = labels.max() + 1
    if k < 2:
        return -np.inf, None
    onehot = np.zeros((labels.size, k))
    onehot[np.arange(labels.size), labels] = 1.0
    between = onehot.T @ M @ onehot
    gain = 2 * between
    gain[np.tril_indices(k)] = -np.inf
    a, b = np.unravel_index(np.argmax(gain), gain.shape)
    return gain[a, b], ("merge", a, b)


def _split(M, members):
    """Split a cluster by seeding its two most disagreeing members."""
    sub = M[np.ix_(members, members)].astype(np.float64)
    np.fill_diagonal(sub, np.inf)
    u, v = np.unravel_index(np.argmin(sub), sub.shape)
    np.fill_diagonal(sub, 0)
    side = sub[:, u] >= sub[:, v]
    side[u], side[v] = True, False
    left, right = members[side], members[~side]
    return -2 * M[np.ix_(left, right)].sum(), right


def _best_split(M, labels):
    best = (-np.inf, None)
    for c in range(labels.max() + 1):
        members = np.flatnonzero(labels == c)
        if members.size < 2:
            continue
        gain, right = _split(M, members)
        if gain > best[0]:
            best = (gain, ("split", c, right))
    return best


def local_search(M, labels):
    """Steepest strictly-improving relocate / merge / split moves to a local optimum."""
    M = np.asarray(M)
    labels = _canonical(labels)
    while True:
        moves = [_best_relocation(M, labels), _best_merge(M, labels), _best_split(M, labels)]
        gain, move = max(moves, key=lambda gm: gm[0])
        if not gain > 0:
            return labels
        op = move[0]
        if op == "move":
            labels[move[1]] = move[2]
        elif op == "merge":
            labels[labels == move[2]] = move[1]
        else:
            labels[move[2]] = labels.max() + 1
        labels = _canonical(labels)


def correlation_cluster(M, restarts: int = 50, rng=None) -> NumeralSystem:
    M = np.asarray(M)
    n = M.shape[0]
    rng = np.random.default_rng(rng)
    best_labels, best_obj = None, None
    for _ in range(restarts):
        k = rng.integers(1, n + 1)
        labels = local_search(M, rng.integers(k, size=n))
        obj = objective(M, labels)
        if best_obj is None or obj > best_obj:
            best_labels, best_obj = labels, obj
    return NumeralSystem(best_labels)


def set_partitions(n: int):
    """All set partitions of range(n) as restricted-growth label vectors."""
    labels = [0] * n

    def rec(i, k):
        if i == n:
            yield np.array(labels)
            return
        for c in range(k + 1):
            labels[i] = c
            yield from rec(i + 1, max(k, c + 1))

    if n == 0:
        return
    labels[0] = 0
    yield from rec(1, 1)


def exhaustive_cluster(M) -> tuple[np.ndarray, int]:
    """Brute-force optimum over all set partitions (oracle for small n)."""
    M = np.asarray(M)
    best, best_obj = None, None
    for labels in set_partitions(M.shape[0]):
        obj = objective(M, labels)
        if best_obj is None or obj > best_obj:
            best, best_obj = labels, obj
    return best, best_obj


def consensus_by_terms(systems) -> dict:
    """Group systems by term count and accumulate one agreement matrix per group."""
    groups: dict = {}
    for s in systems:
        k = s.term_count
        groups[k] = accumulate(groups[k], s) if k in groups else accumulate(empty_agreement(len(s)), s)
    return dict(sorted(groups.items()))
