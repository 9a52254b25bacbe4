"""Minimal dense feed-forward networks with hand-rolled reverse mode.

Hidden layers are rectified, the output layer is linear and starts at
exactly zero so regret matching over a fresh network yields the uniform
strategy.  Everything is float64 numpy and deterministic under a seeded
generator.  Training objectives are weighted, action-masked squared
errors, which covers all four solver losses (cumulative bootstrap,
instantaneous advantages, history-value TD, weighted strategy).
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

BOOTSTRAP_CUMULATIVE = "bootstrap_cumulative"
INSTANTANEOUS = "instantaneous"
Q_TD = "q_td"
WEIGHTED_STRATEGY = "weighted_strategy"

_CHECKPOINT_MAGIC = b"RFNET001"


@dataclass(frozen=True)
class LossSpec:
    kind: str
    alpha: float = 0.0
    gamma: float = 0.0
    total_iterations: int = 0
    discounted: bool = False
    clipped: bool = False

    def __post_init__(self):
        if self.kind not in (BOOTSTRAP_CUMULATIVE, INSTANTANEOUS, Q_TD, WEIGHTED_STRATEGY):
            raise ValueError(f"unknown loss kind {self.kind!r}")


@dataclass
class MlpParams:
    """Dense network weights; `dims` = (input, hidden..., output)."""

    dims: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def copy(self) -> "MlpParams":
        return MlpParams(self.dims, [w.copy() for w in self.weights],
                         [b.copy() for b in self.biases])


def init_mlp(dims, rng: np.random.Generator) -> MlpParams:
    """He-uniform hidden layers, zero-initialized output layer."""
    dims = tuple(int(d) for d in dims)
    weights, biases = [], []
    for i in range(len(dims) - 1):
        fan_in, fan_out = dims[i], dims[i + 1]
        if i == len(dims) - 2:
            w = np.zeros((fan_in, fan_out))
        else:
            limit = np.sqrt(6.0 / fan_in)
            w = rng.uniform(-limit, limit, size=(fan_in, fan_out))
        weights.append(w)
        biases.append(np.zeros(fan_out))
    return MlpParams(dims, weights, biases)


def forward(params: MlpParams, x: np.ndarray) -> np.ndarray:
    """Network output for a single feature vector or a (B, in) batch."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    h = x[None, :] if single else x
    if h.shape[1] != params.dims[0]:
        raise ValueError(f"expected input dim {params.dims[0]}, got {h.shape[1]}")
    last = len(params.weights) - 1
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        h = h @ w + b
        if i != last:
            h = np.maximum(h, 0.0)
    return h[0] if single else h


def mse_gradients(params: MlpParams, features: np.ndarray, targets: np.ndarray,
                  mask: np.ndarray | None = None,
                  sample_weights: np.ndarray | None = None):
    """Gradients of mean_b[w_b * sum_a mask_ba (target - pred)^2].

    Returns ((weight grads, bias grads), scalar loss).  Targets must be
    finite; they are treated as constants.
    """
    X = np.asarray(features, dtype=np.float64)
    Y = np.asarray(targets, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("batch must be a nonempty (B, in) array")
    if not np.isfinite(Y).all():
        raise ValueError("non-finite training targets")
    batch = X.shape[0]
    acts = [X]
    h = X
    last = len(params.weights) - 1
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        h = h @ w + b
        if i != last:
            h = np.maximum(h, 0.0)
        acts.append(h)
    diff = acts[-1] - Y
    if mask is not None:
        diff = diff * mask
    per_sample = (diff * diff).sum(axis=1)
    if sample_weights is not None:
        per_sample = per_sample * sample_weights
    loss = float(per_sample.mean())
    grad_out = 2.0 * diff / batch
    if sample_weights is not None:
        grad_out = grad_out * sample_weights[:, None]
    g_w = [np.empty(0)] * len(params.weights)
    g_b = [np.empty(0)] * len(params.biases)
    delta = grad_out
    for i in range(last, -1, -1):
        g_w[i] = acts[i].T @ delta
        g_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ params.weights[i].T) * (acts[i] > 0.0)
    return (g_w, g_b), loss


@dataclass
class AdamState:
    """First/second moment accumulators plus the step counter."""

    lr: float
    beta1: float
    beta2: float
    eps: float
    step: int
    m_w: list[np.ndarray]
    v_w: list[np.ndarray]
    m_b: list[np.ndarray]
    v_b: list[np.ndarray]


def init_adam(params: MlpParams, lr: float = 0.001,
              beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> AdamState:
    return AdamState(
        lr=lr, beta1=beta1, beta2=beta2, eps=eps, step=0,
        m_w=[np.zeros_like(w) for w in params.weights],
        v_w=[np.zeros_like(w) for w in params.weights],
        m_b=[np.zeros_like(b) for b in params.biases],
        v_b=[np.zeros_like(b) for b in params.biases],
    )


def adam_step(params: MlpParams, state: AdamState, grads) -> tuple[MlpParams, AdamState]:
    """One bias-corrected Adam update; returns fresh params and state."""
    g_w, g_b = grads
    step = state.step + 1
    c1 = 1.0 - state.beta1 ** step
    c2 = 1.0 - state.beta2 ** step
    new_w, new_b = [], []
    m_w, v_w, m_b, v_b = [], [], [], []
    for w, g, m, v in zip(params.weights, g_w, state.m_w, state.v_w):
        if g.shape != w.shape:
            raise ValueError("gradient/parameter shape mismatch")
        m = state.beta1 * m + (1.0 - state.beta1) * g
        v = state.beta2 * v + (1.0 - state.beta2) * (g * g)
        new_w.append(w - state.lr * (m / c1) / (np.sqrt(v / c2) + state.eps))
        m_w.append(m)
        v_w.append(v)
    for b, g, m, v in zip(params.biases, g_b, state.m_b, state.v_b):
        if g.shape != b.shape:
            raise ValueError("gradient/parameter shape mismatch")
        m = state.beta1 * m + (1.0 - state.beta1) * g
        v = state.beta2 * v + (1.0 - state.beta2) * (g * g)
        new_b.append(b - state.lr * (m / c1) / (np.sqrt(v / c2) + state.eps))
        m_b.append(m)
        v_b.append(v)
    return (MlpParams(params.dims, new_w, new_b),
            AdamState(state.lr, state.beta1, state.beta2, state.eps, step,
                      m_w, v_w, m_b, v_b))


# ----------------------------------------------------------------------
# Training targets
# ----------------------------------------------------------------------

def make_target_bootstrap_cumulative(prev_output, sampled_adv, t: int, alpha: float,
                                     discounted: bool, clipped: bool) -> np.ndarray:
    """Bootstrap target: f(previous cumulative estimate) * d + fresh advantages.

    `clipped` applies max(., 0) to the previous estimate; `discounted`
    scales it by (t-1)^alpha / ((t-1)^alpha + 1) (alpha=1 gives the linear
    (t-1)/t weighting), otherwise the scale is 1.
    """
    if t < 1:
        raise ValueError("iteration counter starts at 1")
    prev = np.asarray(prev_output, dtype=np.float64)
    if clipped:
        prev = np.maximum(prev, 0.0)
    if discounted:
        x = float(t - 1)
        d = 0.0 if (x == 0.0 and alpha > 0.0) else 1.0 / (1.0 + x ** -alpha)
        prev = prev * d
    return prev + np.asarray(sampled_adv, dtype=np.float64)


def make_target_q(u_hat: float, successor_value: float, terminal: bool) -> float:
    """TD target for the history value network (player-0 perspective)."""
    if terminal:
        return u_hat
    return u_hat + successor_value


def strategy_loss_weight(t: int, total_iterations: int, gamma: float) -> float:
    """(t/T)^gamma weighting for average-strategy samples."""
    if not 1 <= t <= total_iterations:
        raise ValueError(f"iteration {t} outside 1..{total_iterations}")
    return (t / total_iterations) ** gamma


# ----------------------------------------------------------------------
# Checkpoints: versioned header + architecture + little-endian f32 arrays
# ----------------------------------------------------------------------

def save_params(path, params: MlpParams, meta: dict | None = None) -> None:
    header = {"dims": list(params.dims), "meta": meta or {}}
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as f:
        f.write(_CHECKPOINT_MAGIC)
        f.write(struct.pack("<I", len(blob)))
        f.write(blob)
        for w, b in zip(params.weights, params.biases):
            f.write(w.astype("<f4").tobytes())
            f.write(b.astype("<f4").tobytes())


def load_params(path) -> tuple[MlpParams, dict]:
    with open(path, "rb") as f:
        magic = f.read(len(_CHECKPOINT_MAGIC))
        if magic != _CHECKPOINT_MAGIC:
            raise ValueError(f"not a parameter checkpoint: {path}")
        (hlen,) = struct.unpack("<I", f.read(4))
        header = json.loads(f.read(hlen).decode("utf-8"))
        dims = tuple(header["dims"])
        weights, biases = [], []
        for i in range(len(dims) - 1):
            w = np.frombuffer(f.read(4 * dims[i] * dims[i + 1]), dtype="<f4")
            weights.append(w.reshape(dims[i], dims[i + 1]).astype(np.float64))
            b = np.frombuffer(f.read(4 * dims[i + 1]), dtype="<f4")
            biases.append(b.astype(np.float64))
    return MlpParams(dims, weights, biases), header["meta"]
