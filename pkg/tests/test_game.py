import numpy as np
import pytest

from emergent_numerals.core import NeedPrior, Vocabulary, reward
from emergent_numerals.game import (GameConfig, play_batch, play_batch_arrays, play_round,
                                    train_pair, update_agents)
from emergent_numerals.neural import AgentNet


def identity_agents(big=50.0):
    # one hidden unit per input wired to the matching output head
    s = AgentNet(np.eye(20) * big, np.zeros(20), np.eye(20), np.zeros(20), keep_prob=1.0)
    l = AgentNet(np.eye(20) * big, np.zeros(20), np.eye(20), np.zeros(20), keep_prob=1.0)
    return s, l


def test_zero_nets_tie_break(rng):
    s, l = AgentNet.zeros(20, 10), AgentNet.zeros(10, 20)
    for n in range(1, 21):
        t = play_round(s, l, n, rng)
        assert (t.w, t.n_hat) == (0, 1)
        assert t.r == reward("linear", n, 1)


def test_identity_agents_perfect(rng):
    s, l = identity_agents()
    for n in range(1, 21):
        t = play_round(s, l, n, rng)
        assert t.n_hat == n and t.r == 1.0
    cfg = GameConfig(prior=NeedPrior(np.full(20, 0.05)), vocab=Vocabulary(20))
    assert play_batch_arrays(s, l, cfg, rng).rewards.mean() == 1.0


def test_round_replay():
    a = AgentNet.init(20, 10, rng=np.random.default_rng(0))
    b = AgentNet.init(10, 20, rng=np.random.default_rng(1))
    t1 = play_round(a, b, 7, np.random.default_rng(3), "exp")
    t2 = play_round(a, b, 7, np.random.default_rng(3), "exp")
    assert (t1.w, t1.n_hat, t1.r) == (t2.w, t2.n_hat, t2.r)
    assert np.array_equal(t1.sender_mask, t2.sender_mask)


def test_batch_sampling_uniform():
    cfg = GameConfig(prior=NeedPrior(np.full(20, 0.05)), batch_size=100_000)
    s, l = AgentNet.zeros(20, 10), AgentNet.zeros(10, 20)
    b = play_batch_arrays(s, l, cfg, np.random.default_rng(0))
    freq = np.bincount(b.n_idx, minlength=20) / b.n_idx.size
    assert np.all(np.abs(freq - 0.05) < 0.01 * 0.05 * 20)  # within one percentage point


def test_batch_degenerate_prior(rng):
    p = np.zeros(20)
    p[2] = 1.0
    cfg = GameConfig(prior=NeedPrior(p), batch_size=50)
    a = AgentNet.init(20, 10, rng=rng)
    b = AgentNet.init(10, 20, rng=rng)
    ts = play_batch(a, b, cfg, rng)
    assert all(t.n == 3 for t in ts)
    # shared reward: stored r is the reward of (n, n_hat)
    assert all(t.r == reward("linear", t.n, t.n_hat) for t in ts)


def test_untrained_zero_pair_expectation():
    # zero nets always answer n_hat = 1, so the expectation under the uniform
    # prior is the brute-force mean of r_linear(n, 1)
    cfg = GameConfig(prior=NeedPrior(np.full(20, 0.05)), batch_size=20_000)
    s, l = AgentNet.zeros(20, 10), AgentNet.zeros(10, 20)
    b = play_batch_arrays(s, l, cfg, np.random.default_rng(7))
    expect = np.mean([reward("linear", n, 1) for n in range(1, 21)])
    assert expect == pytest.approx(0.525)
    assert b.rewards.mean() == pytest.approx(expect, abs=0.005)
    assert np.all(b.guess_idx == 0)


def test_update_uses_only_own_view(rng):
    cfg = GameConfig(prior=NeedPrior(np.full(20, 0.05)), batch_size=30)
    a = AgentNet.init(20, 10, rng=rng)
    b = AgentNet.init(10, 20, rng=rng)
    batch = play_batch_arrays(a, b, cfg, rng)
    a2, b2 = a.copy(), b.copy()
    update_agents(a, b, batch)
    # changing the listener's guesses must not change the sender update
    batch.guess_idx = (batch.guess_idx + 1) % 20
    update_agents(a2, b2, batch)
    assert np.array_equal(a.flat, a2.flat)
    assert not np.array_equal(b.flat, b2.flat)


def test_train_pair_deterministic_and_bounded():
    cfg = GameConfig(prior=NeedPrior(np.full(20, 0.05)), updates=30, seed=11)
    t1 = train_pair(cfg).reward_trace
    t2 = train_pair(cfg).reward_trace
    assert np.array_equal(t1, t2) and t1.size == 30
    assert np.all((t1 > 0) & (t1 <= 1))


def test_config_validation():
    with pytest.raises(ValueError):
        GameConfig(prior=NeedPrior(np.full(20, 0.05)), dropout=1.0)
    with pytest.raises(ValueError):
        GameConfig(prior=NeedPrior(np.full(20, 0.05)), batch_size=0)
    with pytest.raises(ValueError):
        GameConfig(prior=NeedPrior(np.full(10, 0.1)))
