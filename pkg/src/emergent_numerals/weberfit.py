"""Fit the Gaussian approximate-number model to listener posteriors.

Each word w of a pair gets a mean mu_w = E[n | w] under the Bayes listener.
The model row for Weber fraction nu is proportional to
``exp(-(|n - mu| / (2 nu mu))**2)`` and nu is chosen on a fixed grid to
minimise the squared error against the listener rows.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .core import DomainError, NumberLine

log = logging.getLogger(__name__)

NU_GRID = np.round(np.arange(0.05, 2.0 + 1e-9, 0.01), 2)


@dataclass(frozen=True, eq=False)
class WeberFit:
    nu: float
    mse: float
    per_word_mu: np.ndarray
    mse_curve: np.ndarray  # one value per NU_GRID entry


@dataclass(frozen=True, eq=False)
class PooledWeberFit:
    nu: float
    mse_mean: float
    mse_std: float
    fits: list
    mse_curve: np.ndarray


def expected_number(row, line: NumberLine = NumberLine()) -> float:
    row = np.asarray(row, dtype=np.float64)
    if row.shape != (line.size,) or abs(row.sum() - 1.0) > 1e-9 or np.any(row < 0):
        raise DomainError("posterior row must be a distribution over the number line")
    return float(row @ line.numbers)


def gaussian_model_rows(mus, nus, line: NumberLine = NumberLine(), standard: bool = False):
    """Model rows for every (nu, mu) pair: shape (len(nus), len(mus), |N|)."""
    mus = np.atleast_1d(np.asarray(mus, dtype=np.float64))
    nus = np.atleast_1d(np.asarray(nus, dtype=np.float64))
    if np.any(mus <= 0) or np.any(nus <= 0):
        raise DomainError("mu and nu must be positive")
    n = line.numbers.astype(np.float64)
    spread = nus[:, None, None] * mus[None, :, None]
    dist = np.abs(n[None, None, :] - mus[None, :, None])
    if standard:
        logits = -dist ** 2 / (2.0 * spread ** 2)
    else:
        logits = -(dist / (2.0 * spread)) ** 2
    logits -= logits.max(axis=-1, keepdims=True)
    rows = np.exp(logits)
    return rows / rows.sum(axis=-1, keepdims=True)


def gaussian_model_row(mu: float, nu: float, line: NumberLine = NumberLine(),
                       standard: bool = False) -> np.ndarray:
    return gaussian_model_rows([mu], [nu], line, standard)[0, 0]


def fit_pair(rows, line: NumberLine = NumberLine(), grid=NU_GRID, standard: bool = False,
             mus=None) -> WeberFit:
    """Grid search over nu; MSE averaged over all (word, number) cells.

    Word means default to E[n | w] of each row; pass ``mus`` to fix them.
    A Gaussian truncated to the line has E[n] != mu near the ends, so rows
    built from a known mu are only fitted exactly when that mu is supplied.
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    if mus is None:
        mus = np.array([expected_number(r, line) for r in rows])
    else:
        mus = np.asarray(mus, dtype=np.float64)
    model = gaussian_model_rows(mus, grid, line, standard)
    curve = ((model - rows[None]) ** 2).mean(axis=(1, 2))
    i = int(np.argmin(curve))
    return WeberFit(float(grid[i]), float(curve[i]), mus, curve)


def fit_weber(posteriors, line: NumberLine = NumberLine(), grid=NU_GRID,
              standard: bool = False) -> PooledWeberFit:
    """Per-pair fits plus the nu minimising the mean per-pair MSE.

    ``posteriors`` holds one array of reachable listener rows per pair (or a
    ListenerPosterior); pairs without reachable words get ``None``.
    """
    fits = []
    for post in posteriors:
        rows = post.reachable_rows() if hasattr(post, "reachable_rows") else np.asarray(post)
        if rows.size == 0:
            log.warning("skipping pair with no reachable words")
            fits.append(None)
            continue
        fits.append(fit_pair(rows, line, grid, standard))
    curves = np.array([f.mse_curve for f in fits if f is not None])
    if curves.size == 0:
        raise ValueError("no pair has reachable words")
    pooled = curves.mean(axis=0)
    i = int(np.argmin(pooled))
    at_nu = curves[:, i]
    return PooledWeberFit(float(grid[i]), float(at_nu.mean()), float(at_nu.std()), fits, pooled)
