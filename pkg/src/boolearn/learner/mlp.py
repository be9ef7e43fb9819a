"""Feed-forward network with one logistic output, trained by mini-batch Adam.

Training runs a *stack* of G independent networks in lock-step so that the
k folds of a cross-validation share every numpy call. Each network keeps its
own data, batch order and Adam step counter; rows are padded to a common
batch shape and masked out of the loss.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from ..dataset import Dataset

ACTIVATIONS = ("relu", "logistic")


@dataclass(frozen=True)
class MlpConfig:
    hidden_layers: tuple[int, ...] = (200, 100)
    activation: str = "relu"
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    epochs: int = 200
    l2: float = 1e-4
    batch_size: int = 200
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "hidden_layers", tuple(int(w) for w in self.hidden_layers))
        if not self.hidden_layers or min(self.hidden_layers) < 1:
            raise ValueError("hidden layer widths must be >= 1")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"activation must be one of {ACTIVATIONS}")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise ValueError("beta1 and beta2 must lie in (0, 1)")
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be >= 1")
        if self.l2 < 0:
            raise ValueError("l2 must be non-negative")

    def with_(self, **kw) -> "MlpConfig":
        return replace(self, **kw)


@dataclass
class TrainedModel:
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    config: MlpConfig
    final_loss: float
    loss_history: list[float] = field(default_factory=list, repr=False)

    def predict_proba(self, X) -> np.ndarray:
        a = np.asarray(X, dtype=np.float64)
        if a.ndim == 1:
            a = a[None, :]
        if a.shape[1] != self.weights[0].shape[0]:
            raise ValueError(f"expected {self.weights[0].shape[0]} features, got {a.shape[1]}")
        act = _act(self.config.activation)
        for W, b in zip(self.weights[:-1], self.biases[:-1]):
            a = act(a @ W + b)
        return _sigmoid(a @ self.weights[-1] + self.biases[-1])[:, 0]

    def predict_many(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.uint8)

    def dump(self) -> str:
        """Plain-text dump: layer shapes then weights and biases, one row per line."""
        lines = [f"activation {self.config.activation}"]
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            lines.append(f"layer {i} {W.shape[0]} {W.shape[1]}")
            lines.extend(" ".join(repr(float(x)) for x in row) for row in W)
            lines.append(" ".join(repr(float(x)) for x in b))
        return "\n".join(lines) + "\n"


def predict(m: TrainedModel, features) -> int:
    f = np.asarray(features)
    if f.ndim != 1:
        raise ValueError("predict takes a single feature vector")
    return int(m.predict_many(f)[0])


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def _relu(z):
    return np.maximum(z, 0.0)


def _act(name):
    return _relu if name == "relu" else _sigmoid


def _act_grad(name, z, a):
    if name == "relu":
        return (z > 0).astype(z.dtype)
    return a * (1.0 - a)


def layer_dims(num_inputs: int, cfg: MlpConfig) -> list[int]:
    return [num_inputs, *cfg.hidden_layers, 1]


def init_params(dims: Sequence[int], rng: np.random.Generator) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Glorot-uniform weights, zero biases."""
    Ws, bs = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        Ws.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        bs.append(np.zeros(fan_out))
    return Ws, bs


def loss_and_grads(Ws, bs, X, y, mask, activation: str, l2: float):
    """Masked mean binary cross-entropy plus l2/(2n) * sum W^2, for stacked networks.

    Shapes: Ws[i] (G, d_i, d_i+1), bs[i] (G, d_i+1), X (G, B, d0), y and mask (G, B).
    ``n`` is each network's count of unmasked rows. Returns (loss per network,
    weight grads, bias grads).
    """
    act = _act(activation)
    count = np.maximum(mask.sum(axis=1), 1.0)  # (G,)
    zs, acts = [], [X]
    a = X
    L = len(Ws)
    for i in range(L):
        z = np.matmul(a, Ws[i]) + bs[i][:, None, :]
        zs.append(z)
        a = act(z) if i < L - 1 else z
        acts.append(a)
    logit = zs[-1][..., 0]
    # softplus(z) - y z, computed stably
    bce = np.logaddexp(0.0, logit) - y * logit
    loss = (bce * mask).sum(axis=1) / count
    penalty = sum((W * W).sum(axis=(1, 2)) for W in Ws)
    loss = loss + 0.5 * l2 * penalty / count
    delta = ((_sigmoid(logit) - y) * mask / count[:, None])[..., None]
    gWs, gbs = [None] * L, [None] * L
    for i in range(L - 1, -1, -1):
        gWs[i] = np.matmul(np.swapaxes(acts[i], 1, 2), delta) + (l2 / count)[:, None, None] * Ws[i]
        gbs[i] = delta.sum(axis=1)
        if i:
            delta = np.matmul(delta, np.swapaxes(Ws[i], 1, 2)) * _act_grad(activation, zs[i - 1], acts[i])
    return loss, gWs, gbs


class Adam:
    """Bias-corrected Adam over a list of stacked parameter arrays with per-network step counts."""

    def __init__(self, params, lr, beta1, beta2, eps):
        self.lr, self.b1, self.b2, self.eps = lr, beta1, beta2, eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = np.zeros(params[0].shape[0])

    def step(self, params, grads, active: np.ndarray) -> None:
        self.t += active
        t = np.maximum(self.t, 1.0)
        c1 = 1.0 - self.b1 ** t
        c2 = 1.0 - self.b2 ** t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            shape = (-1,) + (1,) * (p.ndim - 1)
            on = active.reshape(shape).astype(bool)
            m_new = self.b1 * m + (1.0 - self.b1) * g
            v_new = self.b2 * v + (1.0 - self.b2) * g * g
            upd = self.lr * (m_new / c1.reshape(shape)) / (np.sqrt(v_new / c2.reshape(shape)) + self.eps)
            np.copyto(m, m_new, where=on)
            np.copyto(v, v_new, where=on)
            np.subtract(p, upd, out=p, where=on)


def fit_stack(Xs: Sequence[np.ndarray], ys: Sequence[np.ndarray], cfg: MlpConfig,
              streams: Sequence[int]) -> list[TrainedModel]:
    """Train one network per (X, y) pair; network g draws its randomness from (cfg.seed, streams[g])."""
    G = len(Xs)
    d0 = Xs[0].shape[1]
    dims = layer_dims(d0, cfg)
    rngs = [np.random.default_rng([cfg.seed, s]) for s in streams]
    inits = [init_params(dims, r) for r in rngs]
    Ws = [np.stack([ini[0][i] for ini in inits]) for i in range(len(dims) - 1)]
    bs = [np.stack([ini[1][i] for ini in inits]) for i in range(len(dims) - 1)]
    opt = Adam(Ws + bs, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.epsilon)
    Xf = [np.asarray(X, dtype=np.float64) for X in Xs]
    yf = [np.asarray(y, dtype=np.float64) for y in ys]
    sizes = [len(y) for y in yf]
    B = cfg.batch_size
    nb = max(-(-n // B) for n in sizes)
    width = min(B, max(sizes))
    Xb = np.zeros((G, width, d0))
    yb = np.zeros((G, width))
    mb = np.zeros((G, width))
    history: list[np.ndarray] = []
    for _ in range(cfg.epochs):
        perms = [r.permutation(n) for r, n in zip(rngs, sizes)]
        epoch_loss = np.zeros(G)
        for k in range(nb):
            Xb.fill(0.0)
            yb.fill(0.0)
            mb.fill(0.0)
            for g in range(G):
                idx = perms[g][k * B:(k + 1) * B]
                c = len(idx)
                if c:
                    Xb[g, :c] = Xf[g][idx]
                    yb[g, :c] = yf[g][idx]
                    mb[g, :c] = 1.0
            active = (mb.sum(axis=1) > 0).astype(np.float64)
            loss, gWs, gbs = loss_and_grads(Ws, bs, Xb, yb, mb, cfg.activation, cfg.l2)
            epoch_loss += loss * mb.sum(axis=1)
            opt.step(Ws + bs, gWs + gbs, active)
        history.append(epoch_loss / np.maximum(sizes, 1))
    hist = np.array(history)
    return [TrainedModel([W[g].copy() for W in Ws], [b[g].copy() for b in bs], cfg,
                         float(hist[-1, g]), hist[:, g].tolist())
            for g in range(G)]


def train_mlp(d: Dataset, cfg: MlpConfig) -> TrainedModel:
    if len(d) == 0:
        raise ValueError("cannot train on an empty dataset")
    if len(np.unique(d.y)) < 2:
        raise ValueError("training data holds a single class")
    if d.X.shape[1] != d.num_vars:
        raise ValueError("feature width does not match num_vars")
    return fit_stack([d.X], [d.y], cfg, [0])[0]
