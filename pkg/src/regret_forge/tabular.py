"""Exact full-traversal CFR with pluggable variant update rules.

Supported variants: cfr, cfr_plus, linear_cfr, dcfr, dcfr_plus, pcfr_plus,
pdcfr_plus.  The plus family always runs alternating player updates; the
predictive variants (pcfr_plus, pdcfr_plus) compute each strategy from the
predicted next cumulative regrets, seeding the prediction with the last
observed instantaneous regrets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .games import Game, InfoSetId
from .tree import FlatGame, compiled

VARIANTS = ("cfr", "cfr_plus", "linear_cfr", "dcfr", "dcfr_plus", "pcfr_plus", "pdcfr_plus")
_PLUS_FAMILY = ("cfr_plus", "dcfr_plus", "pcfr_plus", "pdcfr_plus")
# Variants whose cumulative strategy uses the ((t-1)/t)^gamma decay.
_DCFR_STRATEGY = ("dcfr", "dcfr_plus", "pcfr_plus", "pdcfr_plus")

_ALIASES = {
    "cfr": "cfr", "cfr+": "cfr_plus", "linear": "linear_cfr", "linear_cfr": "linear_cfr",
    "dcfr": "dcfr", "dcfr+": "dcfr_plus", "dcfr_plus": "dcfr_plus",
    "pcfr+": "pcfr_plus", "pcfr_plus": "pcfr_plus",
    "pdcfr+": "pdcfr_plus", "pdcfr_plus": "pdcfr_plus", "cfr_plus": "cfr_plus",
}

_DEFAULTS = {  # (alpha, beta, gamma)
    "cfr": (0.0, 0.0, 0.0),
    "cfr_plus": (0.0, 0.0, 0.0),
    "linear_cfr": (0.0, 0.0, 0.0),
    "dcfr": (1.5, 0.0, 2.0),
    "dcfr_plus": (2.0, 0.0, 2.0),
    "pcfr_plus": (0.0, 0.0, 2.0),
    "pdcfr_plus": (2.3, 0.0, 2.0),
}


@dataclass(frozen=True)
class RegretUpdateRule:
    variant: str
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    alternating: bool = True
    # Diagnostic switch: predict with zero instantaneous regrets, which
    # collapses pcfr_plus onto cfr_plus.
    zero_prediction: bool = False

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        for name in ("alpha", "beta", "gamma"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.variant in _PLUS_FAMILY and not self.alternating:
            raise ValueError(f"{self.variant} requires alternating updates")

    @property
    def predictive(self) -> bool:
        return self.variant in ("pcfr_plus", "pdcfr_plus")


def make_rule(variant: str, alpha: float | None = None, beta: float | None = None,
              gamma: float | None = None, alternating: bool | None = None) -> RegretUpdateRule:
    """Build a rule from a CLI-style variant name with per-variant defaults."""
    canon = _ALIASES.get(variant)
    if canon is None:
        raise ValueError(f"unknown variant {variant!r}")
    d_alpha, d_beta, d_gamma = _DEFAULTS[canon]
    return RegretUpdateRule(
        variant=canon,
        alpha=d_alpha if alpha is None else alpha,
        beta=d_beta if beta is None else beta,
        gamma=d_gamma if gamma is None else gamma,
        alternating=True if alternating is None else alternating,
    )


def regret_matching(regrets) -> np.ndarray:
    """Distribution proportional to positive regrets; uniform when none."""
    r = np.asarray(regrets, dtype=np.float64)
    pos = np.maximum(r, 0.0)
    total = pos.sum()
    if total > 0.0:
        return pos / total
    return np.full(r.shape, 1.0 / r.size)


def regret_matching_argmax(regrets) -> np.ndarray:
    """Regret matching that falls back to the argmax action.

    When no regret is positive but some are negative, plays a point mass on
    the largest entry (ties to the lowest index).  An all-zero vector
    carries no preference yet and stays uniform, so fresh zero-initialized
    networks start from the uniform strategy.
    """
    r = np.asarray(regrets, dtype=np.float64)
    pos = np.maximum(r, 0.0)
    total = pos.sum()
    if total > 0.0:
        return pos / total
    if np.any(r < 0.0):
        out = np.zeros(r.shape)
        out[int(np.argmax(r))] = 1.0
        return out
    return np.full(r.shape, 1.0 / r.size)


def discount(x: float, alpha: float) -> float:
    """x^alpha / (x^alpha + 1), stable for large alpha; 0 at x=0 for alpha>0."""
    if x == 0.0 and alpha > 0.0:
        return 0.0
    return 1.0 / (1.0 + float(x) ** -alpha)


def update_cumulative_regret(rule: RegretUpdateRule, r_prev, r_t, t: int):
    """One cumulative-regret update; accepts scalars or aligned arrays."""
    if t < 1:
        raise ValueError("iteration counter starts at 1")
    r_prev = np.asarray(r_prev, dtype=np.float64)
    r_t = np.asarray(r_t, dtype=np.float64)
    v = rule.variant
    if v == "cfr":
        return r_prev + r_t
    if v in ("cfr_plus", "pcfr_plus"):
        return np.maximum(r_prev + r_t, 0.0)
    if v == "linear_cfr":
        return r_prev + t * r_t
    if v == "dcfr":
        mult = np.where(r_prev > 0.0,
                        discount(t - 1, rule.alpha), discount(t - 1, rule.beta))
        return r_prev * mult + r_t
    if v in ("dcfr_plus", "pdcfr_plus"):
        return np.maximum(r_prev * discount(t - 1, rule.alpha) + r_t, 0.0)
    raise AssertionError(v)


def predicted_cumulative_regret(rule: RegretUpdateRule, r_cum, r_tilde, t: int):
    """Predicted next cumulative regrets for the predictive variants."""
    if not rule.predictive:
        raise ValueError(f"{rule.variant} does not predict cumulative regrets")
    r_cum = np.asarray(r_cum, dtype=np.float64)
    r_tilde = np.asarray(r_tilde, dtype=np.float64)
    if rule.variant == "pcfr_plus":
        return np.maximum(r_cum + r_tilde, 0.0)
    return np.maximum(r_cum * discount(t, rule.alpha) + r_tilde, 0.0)


def update_cumulative_strategy(rule: RegretUpdateRule, c_prev, weight, t: int):
    """One cumulative-strategy update with the variant's iterate weighting."""
    c_prev = np.asarray(c_prev, dtype=np.float64)
    weight = np.asarray(weight, dtype=np.float64)
    if np.any(weight < 0.0):
        raise ValueError("reach-weighted probabilities cannot be negative")
    v = rule.variant
    if v == "cfr":
        return c_prev + weight
    if v in ("cfr_plus", "linear_cfr"):
        return c_prev + t * weight
    return c_prev * ((t - 1) / t) ** rule.gamma + weight


class TabularPolicy:
    """Per-infoset action distributions; unknown infosets answer uniform."""

    def __init__(self, table: dict[InfoSetId, np.ndarray] | None = None):
        self._table: dict[InfoSetId, np.ndarray] = {}
        if table:
            for key, probs in table.items():
                self.set(key, probs)

    def set(self, key: InfoSetId, probs) -> None:
        p = np.asarray(probs, dtype=np.float64)
        if np.any(p < 0.0) or not np.isfinite(p).all():
            raise ValueError(f"invalid distribution for {key}: {p}")
        total = p.sum()
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"distribution for {key} sums to {total}")
        self._table[key] = p / total

    def prob(self, key: InfoSetId, n_actions: int) -> np.ndarray:
        p = self._table.get(key)
        if p is None:
            return np.full(n_actions, 1.0 / n_actions)
        return p

    def items(self):
        return self._table.items()

    def __len__(self) -> int:
        return len(self._table)

    def __contains__(self, key: InfoSetId) -> bool:
        return key in self._table


class TabularState:
    """Cumulative regrets/strategies over a compiled game's action slots."""

    def __init__(self, flat: FlatGame, rule: RegretUpdateRule):
        self.flat = flat
        self.rule = rule
        self.regret = np.zeros(flat.num_slots)
        self.cum_strategy = np.zeros(flat.num_slots)
        self.last_regret = np.zeros(flat.num_slots)
        self.t = 0
        self.updates_done = [0, 0]
        self.slot_owner = flat.iso_owner[flat.slot_iso]
        ep = flat.player[flat.edge_parent]
        self.player_edges = (np.where(ep == 0)[0], np.where(ep == 1)[0])

    def strategy_slots(self) -> np.ndarray:
        """Current strategy for every slot, per the rule's matching scheme."""
        flat, rule = self.flat, self.rule
        if not rule.predictive:
            base = self.regret
        else:
            pred = np.zeros(flat.num_slots)
            r_tilde = np.zeros(flat.num_slots) if rule.zero_prediction else self.last_regret
            for p in (0, 1):
                sel = self.slot_owner == p
                pred[sel] = predicted_cumulative_regret(
                    rule, self.regret[sel], r_tilde[sel], self.updates_done[p])
            base = pred
        return _match_slots(flat, base)

    def average_slots(self) -> np.ndarray:
        return _match_slots(self.flat, self.cum_strategy)


def _match_slots(flat: FlatGame, values: np.ndarray) -> np.ndarray:
    """Vectorized regret matching per infoset over the slot layout."""
    pos = np.maximum(values, 0.0)
    sums = np.add.reduceat(pos, flat.iso_off)
    expand = np.repeat(sums, flat.iso_nact)
    safe = np.where(expand > 0.0, expand, 1.0)
    return np.where(expand > 0.0, pos / safe, flat.uniform_slots())


def average_strategy(state: TabularState) -> TabularPolicy:
    """Normalized cumulative strategy; all-zero rows fall back to uniform."""
    slots = state.average_slots()
    flat = state.flat
    policy = TabularPolicy()
    for k, key in enumerate(flat.iso_keys):
        policy.set(key, slots[flat.slots_of(k)])
    return policy


def _player_pass(state: TabularState, player: int, slots: np.ndarray) -> None:
    flat = state.flat
    r0, r1, rc = flat.reach(slots)
    val = flat.values(slots, player)
    reach_own = r0 if player == 0 else r1
    reach_opp = (r1 if player == 0 else r0) * rc
    edges = state.player_edges[player]
    pe = flat.edge_parent[edges]
    es = flat.edge_slot[edges]
    inst = np.zeros(flat.num_slots)
    wgt = np.zeros(flat.num_slots)
    np.add.at(inst, es, reach_opp[pe] * (val[flat.edge_child[edges]] - val[pe]))
    np.add.at(wgt, es, reach_own[pe] * slots[es])
    sel = state.slot_owner == player
    t = state.t
    state.regret[sel] = update_cumulative_regret(state.rule, state.regret[sel], inst[sel], t)
    state.cum_strategy[sel] = update_cumulative_strategy(
        state.rule, state.cum_strategy[sel], wgt[sel], t)
    state.last_regret[sel] = inst[sel]
    state.updates_done[player] = t


def run_iteration(state: TabularState) -> None:
    """Advance one CFR iteration (both players)."""
    state.t += 1
    if state.rule.alternating:
        for player in (0, 1):
            _player_pass(state, player, state.strategy_slots())
    else:
        slots = state.strategy_slots()
        for player in (0, 1):
            _player_pass(state, player, slots)


def exploitability_slots(flat: FlatGame, slots: np.ndarray) -> float:
    return 0.5 * (flat.best_response_value(slots, 0) + flat.best_response_value(slots, 1))


def run_cfr(game: Game, rule: RegretUpdateRule, iterations: int,
            eval_points=(), on_checkpoint=None) -> tuple[TabularPolicy, list[tuple[int, float]]]:
    """Run `iterations` CFR updates and return the average strategy.

    `eval_points` selects iterations at which the average strategy's exact
    exploitability (normalized units) is appended to the returned log; the
    final iteration is always logged.  `on_checkpoint(iteration, value)`
    streams the same rows as they are produced.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    flat = compiled(game)
    state = TabularState(flat, rule)
    points = set(eval_points) | {iterations}
    log: list[tuple[int, float]] = []
    for _ in range(iterations):
        run_iteration(state)
        if state.t in points:
            expl = exploitability_slots(flat, state.average_slots())
            log.append((state.t, expl))
            if on_checkpoint is not None:
                on_checkpoint(state.t, expl)
    return average_strategy(state), log
