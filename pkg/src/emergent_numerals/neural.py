"""One-hidden-layer ReLU value network with dropout sampling, MSE loss and Adam.

Inputs are one-hot indices, so the first layer reduces to a column lookup
``W1[:, x]``.  Masks are binary; the ``1/keep_prob`` scaling of inverted
dropout is applied inside :func:`forward` whenever a mask is given.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import DomainError

PARAM_NAMES = ("W1", "b1", "W2", "b2")


@dataclass
class AdamState:
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)
    step: int = 0


@dataclass(eq=False)
class AgentNet:
    W1: np.ndarray  # hidden x in
    b1: np.ndarray
    W2: np.ndarray  # out x hidden
    b2: np.ndarray
    keep_prob: float = 0.7
    adam: AdamState = field(default_factory=AdamState)

    def __post_init__(self):
        arrays = [np.asarray(getattr(self, name), dtype=np.float64) for name in PARAM_NAMES]
        h, n_in = arrays[0].shape
        n_out = arrays[2].shape[0]
        if arrays[1].shape != (h,) or arrays[2].shape != (n_out, h) or arrays[3].shape != (n_out,):
            raise DomainError("inconsistent parameter shapes")
        if not 0.0 < self.keep_prob <= 1.0:
            raise DomainError(f"keep_prob must be in (0, 1], got {self.keep_prob}")
        # all parameters live in one flat buffer so Adam is a single vector update
        self.flat = np.concatenate([a.ravel() for a in arrays])
        offset = 0
        for name, a in zip(PARAM_NAMES, arrays):
            view = self.flat[offset:offset + a.size].reshape(a.shape)
            setattr(self, name, view)
            offset += a.size
        for key in ("flat",):
            self.adam.m.setdefault(key, np.zeros_like(self.flat))
            self.adam.v.setdefault(key, np.zeros_like(self.flat))

    @classmethod
    def init(cls, n_in: int, n_out: int, hidden: int = 50, keep_prob: float = 0.7,
             rng=None, init_scale: float = 1.0) -> "AgentNet":
        """Glorot-uniform weights, zero biases."""
        rng = np.random.default_rng(rng)
        lim1 = init_scale * np.sqrt(6.0 / (n_in + hidden))
        lim2 = init_scale * np.sqrt(6.0 / (hidden + n_out))
        W1 = rng.uniform(-lim1, lim1, size=(hidden, n_in))
        W2 = rng.uniform(-lim2, lim2, size=(n_out, hidden))
        return cls(W1, np.zeros(hidden), W2, np.zeros(n_out), keep_prob=keep_prob)

    @classmethod
    def zeros(cls, n_in: int, n_out: int, hidden: int = 50, keep_prob: float = 0.7) -> "AgentNet":
        return cls(np.zeros((hidden, n_in)), np.zeros(hidden),
                   np.zeros((n_out, hidden)), np.zeros(n_out), keep_prob=keep_prob)

    @property
    def n_in(self) -> int:
        return self.W1.shape[1]

    @property
    def n_out(self) -> int:
        return self.W2.shape[0]

    @property
    def hidden(self) -> int:
        return self.W1.shape[0]

    def params(self) -> dict:
        return {name: getattr(self, name) for name in PARAM_NAMES}

    def copy(self) -> "AgentNet":
        adam = AdamState({k: v.copy() for k, v in self.adam.m.items()},
                         {k: v.copy() for k, v in self.adam.v.items()},
                         self.adam.step)
        return AgentNet(*(p.copy() for p in self.params().values()),
                        keep_prob=self.keep_prob, adam=adam)


def sample_mask(keep_prob: float, rng, size) -> np.ndarray:
    """Bernoulli(keep_prob) keep-mask of the given shape, as float 0/1."""
    if not 0.0 < keep_prob <= 1.0:
        raise DomainError(f"keep_prob must be in (0, 1], got {keep_prob}")
    if keep_prob == 1.0:
        return np.ones(size)
    return (rng.random(size) < keep_prob).astype(np.float64)


def _hidden(net: AgentNet, x, mask):
    x = np.asarray(x)
    if np.any(x < 0) or np.any(x >= net.n_in):
        raise DomainError(f"input index out of range [0, {net.n_in})")
    pre = net.W1[:, x].T + net.b1 if x.ndim else net.W1[:, x] + net.b1
    act = np.maximum(pre, 0.0)
    if mask is None:
        scale = 1.0
    else:
        scale = np.asarray(mask, dtype=np.float64) / net.keep_prob
    return pre, act * scale, scale


def forward(net: AgentNet, x, mask=None) -> np.ndarray:
    """Action values for input index ``x`` (scalar or batch of indices).

    For a batch of B indices ``mask`` (if given) has shape (B, hidden).
    """
    _, h, _ = _hidden(net, x, mask)
    return h @ net.W2.T + net.b2


def _batch_arrays(samples):
    if len(samples) == 0:
        raise DomainError("empty training batch")
    xs, acts, rewards, masks = zip(*samples)
    hidden_masks = None if all(m is None for m in masks) else np.stack(masks)
    return np.asarray(xs), np.asarray(acts), np.asarray(rewards, dtype=np.float64), hidden_masks


def loss_and_grads(net: AgentNet, xs, actions, targets, masks=None):
    """MSE between the value of each taken action and its reward, with gradients."""
    xs = np.asarray(xs)
    actions = np.asarray(actions)
    targets = np.asarray(targets, dtype=np.float64)
    B = xs.size
    pre, h, scale = _hidden(net, xs, masks)
    q = h @ net.W2.T + net.b2
    pred = q[np.arange(B), actions]
    err = pred - targets
    loss = float(np.mean(err ** 2))

    g = 2.0 * err / B  # dL/dpred
    act_hot = np.zeros((B, net.n_out))
    act_hot[np.arange(B), actions] = g
    gW2 = act_hot.T @ h
    gb2 = act_hot.sum(axis=0)
    dh = g[:, None] * net.W2[actions] * scale
    dpre = dh * (pre > 0)
    in_hot = np.zeros((B, net.n_in))
    in_hot[np.arange(B), xs] = 1.0
    gW1 = dpre.T @ in_hot
    gb1 = dpre.sum(axis=0)
    return loss, {"W1": gW1, "b1": gb1, "W2": gW2, "b2": gb2}


def flatten_grads(grads: dict) -> np.ndarray:
    return np.concatenate([np.ravel(grads[name]) for name in PARAM_NAMES])


def adam_step(params: dict, grads: dict, state: AdamState, lr: float = 0.001,
              beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> None:
    """Bias-corrected Adam update, applied in place to ``params`` and ``state``."""
    for name, p in params.items():
        g = np.asarray(grads[name])
        if g.shape != np.shape(p):
            raise DomainError(f"gradient shape {g.shape} != parameter shape {np.shape(p)} for {name}")
        state.m.setdefault(name, np.zeros_like(p))
        state.v.setdefault(name, np.zeros_like(p))
    state.step += 1
    t = state.step
    c1 = 1.0 - beta1 ** t
    c2 = 1.0 - beta2 ** t
    for name, p in params.items():
        g = grads[name]
        m = state.m[name]
        v = state.v[name]
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * g * g
        p -= lr * (m / c1) / (np.sqrt(v / c2) + eps)


def train_batch(net: AgentNet, samples, lr: float = 0.001) -> float:
    """One Adam step on the MSE of ``(input, action, reward, mask)`` samples.

    Returns the loss before the step.
    """
    xs, acts, rewards, masks = _batch_arrays(samples)
    return train_arrays(net, xs, acts, rewards, masks, lr=lr)


def train_arrays(net: AgentNet, xs, actions, targets, masks=None, lr: float = 0.001) -> float:
    """Array form of :func:`train_batch`, used by the game loop."""
    if np.size(xs) == 0:
        raise DomainError("empty training batch")
    loss, grads = loss_and_grads(net, xs, actions, targets, masks)
    adam_step({"flat": net.flat}, {"flat": flatten_grads(grads)}, net.adam, lr=lr)
    return loss


# Checkpoint format: a JSON object with keys
#   "format": "agentnet/1", "dims": [in, hidden, out], "keep_prob", "step",
#   "params": {name: nested lists}, "adam_m": {...}, "adam_v": {...}
# Floats are written with repr so a save/load round trip is exact.

def save_net(net: AgentNet, path) -> None:
    doc = {
        "format": "agentnet/1",
        "dims": [net.n_in, net.hidden, net.n_out],
        "keep_prob": net.keep_prob,
        "step": net.adam.step,
        "params": {k: v.tolist() for k, v in net.params().items()},
        "adam_m": {k: v.tolist() for k, v in net.adam.m.items()},
        "adam_v": {k: v.tolist() for k, v in net.adam.v.items()},
    }
    Path(path).write_text(json.dumps(doc))


def load_net(path) -> AgentNet:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != "agentnet/1":
        raise DomainError(f"unknown checkpoint format {doc.get('format')!r}")
    adam = AdamState({k: np.array(v) for k, v in doc["adam_m"].items()},
                     {k: np.array(v) for k, v in doc["adam_v"].items()},
                     int(doc["step"]))
    p = doc["params"]
    return AgentNet(p["W1"], p["b1"], p["W2"], p["b2"], keep_prob=doc["keep_prob"], adam=adam)
