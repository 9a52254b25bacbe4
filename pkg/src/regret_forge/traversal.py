"""Outcome-sampling traversal with baseline-adjusted sampled values.

One traversal samples a single episode: one action per decision node via
the exploration-mixed sampling policy at traverser nodes (the unmodified
strategy elsewhere), with chance nodes advanced by sampling and never
expanded.  Along the way it emits advantage samples at traverser nodes,
strategy samples at opponent nodes and history-value transitions at every
decision node.

The plain importance-sampling estimators (`estimator_hat`, the
counterfactual-value form, and `estimator_check`, the advantage form) are
exposed for oracle tests and ablations; the traversal itself computes the
baseline-adjusted form, which reduces exactly to the advantage form when
the baseline is identically zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .buffers import AdvantageSample, Buffer, StrategySample, TransitionSample
from .games import CHANCE, Game, History, InfoSetId


def build_sampling_policy(sigma: np.ndarray, epsilon: float, is_traverser: bool) -> np.ndarray:
    """Exploration mix at traverser nodes; opponents sample their strategy."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must lie in [0, 1]")
    sigma = np.asarray(sigma, dtype=np.float64)
    if not is_traverser:
        return sigma
    return epsilon / sigma.size + (1.0 - epsilon) * sigma


def baseline_adjusted_values(q_row: np.ndarray, sampled: int, child_value: float,
                             xi_prob: float) -> np.ndarray:
    """Per-action sampled values around a baseline row.

    The sampled action gets Q + (child - Q)/xi, every other action keeps
    its baseline value, so the row stays unbiased for any fixed baseline.
    """
    if xi_prob <= 0.0:
        raise ValueError("sampled action must have positive sampling probability")
    row = np.asarray(q_row, dtype=np.float64).copy()
    row[sampled] += (child_value - row[sampled]) / xi_prob
    return row


def sampled_advantages(v_row: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """v(I, a) minus the sigma-weighted node value; sigma-mean is zero."""
    v_row = np.asarray(v_row, dtype=np.float64)
    sigma = np.asarray(sigma, dtype=np.float64)
    if v_row.shape != sigma.shape:
        raise ValueError("value row and strategy must align")
    return v_row - float(sigma @ v_row)


def sample_index(probs, rng: np.random.Generator) -> int:
    """Single draw from a probability vector using one uniform variate."""
    u = rng.random()
    acc = 0.0
    for i, p in enumerate(probs):
        acc += p
        if u < acc:
            return i
    return len(probs) - 1


def history_cache_key(h: History) -> tuple:
    """Hashable identity of a history built from its defining slots."""
    parts = [type(h).__name__]
    for cls in type(h).__mro__:
        for slot in getattr(cls, "__slots__", ()):
            if slot != "game":
                parts.append(getattr(h, slot))
    return tuple(parts)


@dataclass
class TraversalContext:
    """Frozen per-iteration wiring for `traverse`.

    `strategy(infoset, action_ids)` returns the current strategy at a
    decision node; `q_values(history, action_ids)`, when present, returns
    the baseline row from player 0's perspective.  Buffers may be omitted
    when only the returned value matters (oracle runs).
    """

    game: Game
    epsilon: float
    strategy: Callable[[InfoSetId, tuple[int, ...]], np.ndarray]
    q_values: Callable[[History, tuple[int, ...]], np.ndarray] | None = None
    adv_buffers: tuple[Buffer, Buffer] | None = None
    strat_buffer: Buffer | None = None
    transition_buffer: Buffer | None = None
    _iso_features: dict[InfoSetId, np.ndarray] = field(default_factory=dict)
    _hist_features: dict[tuple, np.ndarray] = field(default_factory=dict)

    def infoset_features(self, infoset: InfoSetId) -> np.ndarray:
        feat = self._iso_features.get(infoset)
        if feat is None:
            feat = self.game.encode_infoset(infoset)
            self._iso_features[infoset] = feat
        return feat

    def history_features(self, h: History) -> np.ndarray:
        key = history_cache_key(h)
        feat = self._hist_features.get(key)
        if feat is None:
            feat = self.game.encode_history(h)
            self._hist_features[key] = feat
        return feat


def _skip_chance(h: History, rng: np.random.Generator) -> History:
    while not h.terminal and h.player == CHANCE:
        outcomes = h.chance_outcomes()
        h = h.apply(outcomes[sample_index([p for _, p in outcomes], rng)][0])
    return h


def traverse(h: History, traverser: int, ctx: TraversalContext, t: int,
             rng: np.random.Generator) -> float:
    """Sample one episode from `h` and return its node value for `traverser`.

    The returned value is the strategy-weighted baseline-adjusted value at
    the first decision node (the normalized utility at terminals).
    """
    game = ctx.game
    h = _skip_chance(h, rng)
    if h.terminal:
        return game.normalize(h.utility(traverser))
    player = h.player
    infoset = h.infoset_key()
    acts = h.legal_actions()
    sigma = ctx.strategy(infoset, acts)
    xi = build_sampling_policy(sigma, ctx.epsilon, player == traverser)
    a_idx = sample_index(xi, rng)
    child = _skip_chance(h.apply(acts[a_idx]), rng)
    if child.terminal:
        child_value = game.normalize(child.utility(traverser))
        u_hat = game.normalize(child.utility(0))
    else:
        child_value = traverse(child, traverser, ctx, t, rng)
        u_hat = 0.0
    if ctx.q_values is not None:
        q_row = ctx.q_values(h, acts)
        if traverser == 1:
            q_row = -q_row
    else:
        q_row = np.zeros(len(acts))
    v_row = baseline_adjusted_values(q_row, a_idx, child_value, float(xi[a_idx]))
    node_value = float(sigma @ v_row)
    if player == traverser:
        if ctx.adv_buffers is not None:
            ctx.adv_buffers[traverser].insert(AdvantageSample(
                infoset=infoset,
                features=ctx.infoset_features(infoset),
                regrets=v_row - node_value,
                action_ids=acts,
            ))
    elif ctx.strat_buffer is not None:
        ctx.strat_buffer.insert(StrategySample(
            infoset=infoset,
            features=ctx.infoset_features(infoset),
            iteration=t,
            strategy=sigma,
            action_ids=acts,
        ))
    if ctx.transition_buffer is not None:
        if child.terminal:
            sample = TransitionSample(
                iteration=t, h_features=ctx.history_features(h),
                action_id=acts[a_idx], utility=u_hat,
                next_h_features=None, next_infoset=None, next_features=None,
                next_action_ids=None, next_player=None)
        else:
            next_infoset = child.infoset_key()
            sample = TransitionSample(
                iteration=t, h_features=ctx.history_features(h),
                action_id=acts[a_idx], utility=0.0,
                next_h_features=ctx.history_features(child),
                next_infoset=next_infoset,
                next_features=ctx.infoset_features(next_infoset),
                next_action_ids=child.legal_actions(),
                next_player=child.player)
        ctx.transition_buffer.insert(sample)
    return node_value


# ----------------------------------------------------------------------
# Plain importance-sampling estimators (oracle and ablation use)
# ----------------------------------------------------------------------

def episode_path(game: Game, actions) -> list[History]:
    """Histories from the root through a full action sequence."""
    path = [game.root()]
    for a in actions:
        path.append(path[-1].apply(a))
    return path


class MixedSamplingPolicy:
    """The sampling profile: epsilon-mixed for the traverser, sigma elsewhere."""

    def __init__(self, sigma, epsilon: float, traverser: int):
        if not 0.0 <= epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        self.sigma = sigma
        self.epsilon = epsilon
        self.traverser = traverser

    def prob(self, key: InfoSetId, n_actions: int) -> np.ndarray:
        base = self.sigma.prob(key, n_actions)
        return build_sampling_policy(base, self.epsilon, key.owner == self.traverser)


def _locate(episode: list[History], infoset: InfoSetId) -> int:
    for i, h in enumerate(episode[:-1]):
        if not h.terminal and h.player == infoset.owner and h.infoset_key() == infoset:
            return i
    raise ValueError(f"infoset {infoset} is not on the episode path")


def _step_prob(h: History, nxt: History, policy) -> tuple[float, int]:
    """(probability, actor) of the step from h to its successor on the path."""
    if h.player == CHANCE:
        for a, p in h.chance_outcomes():
            if _same(h.apply(a), nxt):
                return p, CHANCE
        raise AssertionError("successor not among chance outcomes")
    acts = h.legal_actions()
    probs = policy.prob(h.infoset_key(), len(acts))
    for j, a in enumerate(acts):
        if _same(h.apply(a), nxt):
            return float(probs[j]), h.player
    raise AssertionError("successor not among legal children")


def _same(a: History, b: History) -> bool:
    # Histories on a path are reconstructed deterministically, so comparing
    # the identifying slots (own and inherited) is enough.
    if type(a) is not type(b):
        return False
    for cls in type(a).__mro__:
        for slot in getattr(cls, "__slots__", ()):
            if slot != "game" and getattr(a, slot) != getattr(b, slot):
                return False
    return True


def _path_action_index(episode, i) -> int:
    h, nxt = episode[i], episode[i + 1]
    for j, a in enumerate(h.legal_actions()):
        if _same(h.apply(a), nxt):
            return j
    raise AssertionError("broken episode path")


def estimator_hat(game: Game, sigma, xi, episode: list[History],
                  infoset: InfoSetId, action: int) -> float:
    """Fully importance-corrected sampled counterfactual value.

    pi_{-i}(z[I]) * pi(z[I]a, z) * u_i(z) / pi_xi(z); zero off the path.
    """
    z = episode[-1]
    if not z.terminal:
        raise ValueError("episode must end at a terminal history")
    i = _locate(episode, infoset)
    owner = infoset.owner
    u = game.normalize(z.utility(owner))
    xi_z = 1.0
    for k in range(len(episode) - 1):
        p, _ = _step_prob(episode[k], episode[k + 1], xi)
        xi_z *= p
    if _path_action_index(episode, i) != action:
        return 0.0
    reach_mi = 1.0
    for k in range(i):
        p, actor = _step_prob(episode[k], episode[k + 1], sigma)
        if actor != owner:
            reach_mi *= p
    interval = 1.0
    for k in range(i + 1, len(episode) - 1):
        p, _ = _step_prob(episode[k], episode[k + 1], sigma)
        interval *= p
    return reach_mi * interval * u / xi_z


def estimator_check(game: Game, sigma, xi, episode: list[History],
                    infoset: InfoSetId, action: int) -> float:
    """Advantage-form sampled value: pi(z[I]a, z) * u_i(z) / pi_xi(z[I], z)."""
    z = episode[-1]
    if not z.terminal:
        raise ValueError("episode must end at a terminal history")
    i = _locate(episode, infoset)
    owner = infoset.owner
    u = game.normalize(z.utility(owner))
    if _path_action_index(episode, i) != action:
        return 0.0
    xi_interval = 1.0
    for k in range(i, len(episode) - 1):
        p, _ = _step_prob(episode[k], episode[k + 1], xi)
        xi_interval *= p
    interval = 1.0
    for k in range(i + 1, len(episode) - 1):
        p, _ = _step_prob(episode[k], episode[k + 1], sigma)
        interval *= p
    return interval * u / xi_interval
