"""Lewis signaling game between a sender and a listener value network.

Each round: a number is drawn from the need prior, the sender draws a
dropout mask and names the word with the highest sampled value, the
listener does the same to guess a number, and both get the same reward.
After a batch of rounds each agent takes one Adam step on the MSE between
the sampled value of its chosen action and the reward.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .core import NeedPrior, NumberLine, RewardKind, Vocabulary, reward
from .neural import AgentNet, forward, sample_mask, train_arrays


@dataclass(frozen=True, eq=False)
class GameConfig:
    prior: NeedPrior
    reward_kind: RewardKind = RewardKind.LINEAR
    line: NumberLine = NumberLine()
    vocab: Vocabulary = Vocabulary()
    batch_size: int = 100
    updates: int = 10_000
    dropout: float = 0.3
    lr: float = 0.001
    hidden: int = 50
    seed: int = 0
    init_scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "reward_kind", RewardKind.parse(self.reward_kind))
        if self.batch_size < 1 or self.updates < 1:
            raise ValueError("batch_size and updates must be >= 1")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError(f"dropout must be in [0, 1), got {self.dropout}")
        if len(self.prior) != self.line.size:
            raise ValueError("prior length does not match the number line")

    @property
    def keep_prob(self) -> float:
        return 1.0 - self.dropout

    def with_(self, **changes) -> "GameConfig":
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class Transition:
    n: int
    w: int
    n_hat: int
    r: float
    sender_mask: np.ndarray
    listener_mask: np.ndarray


@dataclass(eq=False)
class TrainedPair:
    sender: AgentNet
    listener: AgentNet
    config: GameConfig
    reward_trace: np.ndarray = field(default_factory=lambda: np.zeros(0))


def new_pair(config: GameConfig, rng) -> tuple[AgentNet, AgentNet]:
    n_num, n_words = config.line.size, config.vocab.size
    sender = AgentNet.init(n_num, n_words, config.hidden, config.keep_prob, rng, config.init_scale)
    listener = AgentNet.init(n_words, n_num, config.hidden, config.keep_prob, rng, config.init_scale)
    return sender, listener


def thompson_actions(net: AgentNet, inputs, rng):
    """Greedy actions under one fresh dropout mask per input (ties -> lowest index)."""
    inputs = np.asarray(inputs)
    masks = sample_mask(net.keep_prob, rng, (inputs.size, net.hidden))
    values = forward(net, inputs, masks)
    return values.argmax(axis=1), masks


def play_round(sender: AgentNet, listener: AgentNet, n: int, rng,
               kind=RewardKind.LINEAR, line: NumberLine = NumberLine()) -> Transition:
    x = line.index(n)
    s_mask = sample_mask(sender.keep_prob, rng, sender.hidden)
    w = int(np.argmax(forward(sender, x, s_mask)))
    l_mask = sample_mask(listener.keep_prob, rng, listener.hidden)
    n_hat = int(np.argmax(forward(listener, w, l_mask))) + line.lo
    return Transition(int(n), w, n_hat, reward(kind, n, n_hat, line), s_mask, l_mask)


@dataclass(eq=False)
class Batch:
    """Column-wise batch of rounds; numbers are 0-based indices here."""

    n_idx: np.ndarray
    words: np.ndarray
    guess_idx: np.ndarray
    rewards: np.ndarray
    sender_masks: np.ndarray
    listener_masks: np.ndarray

    def transitions(self, line: NumberLine = NumberLine()) -> list[Transition]:
        return [
            Transition(int(n) + line.lo, int(w), int(g) + line.lo, float(r), sm, lm)
            for n, w, g, r, sm, lm in zip(self.n_idx, self.words, self.guess_idx,
                                          self.rewards, self.sender_masks, self.listener_masks)
        ]


def play_batch_arrays(sender: AgentNet, listener: AgentNet, config: GameConfig, rng) -> Batch:
    n_idx = rng.choice(config.line.size, size=config.batch_size, p=config.prior.probs)
    words, s_masks = thompson_actions(sender, n_idx, rng)
    guesses, l_masks = thompson_actions(listener, words, rng)
    r = reward(config.reward_kind, n_idx + config.line.lo, guesses + config.line.lo, config.line)
    return Batch(n_idx, words, guesses, r, s_masks, l_masks)


def play_batch(sender: AgentNet, listener: AgentNet, config: GameConfig, rng) -> list[Transition]:
    return play_batch_arrays(sender, listener, config, rng).transitions(config.line)


def update_agents(sender: AgentNet, listener: AgentNet, batch: Batch, lr: float = 0.001):
    """Sender sees (n, w, r, sender mask); listener sees (w, n_hat, r, listener mask)."""
    s_loss = train_arrays(sender, batch.n_idx, batch.words, batch.rewards, batch.sender_masks, lr)
    l_loss = train_arrays(listener, batch.words, batch.guess_idx, batch.rewards,
                          batch.listener_masks, lr)
    return s_loss, l_loss


def train_pair(config: GameConfig, rng=None) -> TrainedPair:
    """Initialize a pair from ``config.seed`` (or ``rng``) and play ``config.updates`` batches."""
    rng = np.random.default_rng(config.seed if rng is None else rng)
    sender, listener = new_pair(config, rng)
    trace = np.empty(config.updates)
    for t in range(config.updates):
        batch = play_batch_arrays(sender, listener, config, rng)
        trace[t] = batch.rewards.mean()
        update_agents(sender, listener, batch, config.lr)
    return TrainedPair(sender, listener, config, trace)
