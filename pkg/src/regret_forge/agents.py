"""Style-based rule agents for Leduc poker and the head-to-head harness.

Each agent computes its exact showdown win rate at the current decision
point (opponent card and any undealt community card uniform over the
remaining deck, ties worth half) and maps it through fixed thresholds:
raise above `raise_above`, fold at or below `fold_below` (checking when
folding would cost nothing), call in between.  The thresholds are
versioned constants chosen for this adaptation; the tight-aggressive
style additionally bluff-raises a small fraction of its weakest hands.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .games import CHANCE, Game, History, InfoSetId
from .games.leduc import CHECK_CALL, FOLD, RAISE, LeducGame, _rank
from .tabular import TabularPolicy
from .traversal import sample_index

PolicyFn = Callable[[Game, History], np.ndarray]


@dataclass(frozen=True)
class AgentStyle:
    name: str
    raise_above: float
    fold_below: float
    bluff_prob: float = 0.0

    def __post_init__(self):
        if self.fold_below > self.raise_above:
            raise ValueError("fold_below must not exceed raise_above")


# Pre-flop win rates in this game are exactly 0.3 / 0.5 / 0.7 for J / Q / K;
# thresholds are placed around that landscape.
STYLES = {
    "candid_statistician": AgentStyle("candid_statistician", 0.60, 0.40),
    "loose_aggressive": AgentStyle("loose_aggressive", 0.30, 0.05),
    "loose_passive": AgentStyle("loose_passive", 1.01, 0.32),
    "tight_passive": AgentStyle("tight_passive", 1.01, 0.55),
    "tight_aggressive": AgentStyle("tight_aggressive", 0.65, 0.45, bluff_prob=0.20),
}

_DECK = tuple(range(6))


def win_rate(game: Game, infoset: InfoSetId) -> float:
    """Exact showdown win probability from a Leduc decision infoset."""
    if not isinstance(game, LeducGame):
        raise ValueError("win rates are defined for Leduc poker only")
    own_s, comm_s, _ = infoset.key.decode("ascii").split("|")
    own = int(own_s)
    if comm_s == "?":
        total = 0.0
        count = 0
        for opp in _DECK:
            if opp == own:
                continue
            for comm in _DECK:
                if comm in (own, opp):
                    continue
                total += _showdown_points(own, opp, comm)
                count += 1
        return total / count
    comm = int(comm_s)
    total = 0.0
    count = 0
    for opp in _DECK:
        if opp in (own, comm):
            continue
        total += _showdown_points(own, opp, comm)
        count += 1
    return total / count


def _showdown_points(own: int, opp: int, comm: int) -> float:
    if _rank(own) == _rank(comm):
        return 1.0
    if _rank(opp) == _rank(comm):
        return 0.0
    if _rank(own) == _rank(opp):
        return 0.5
    return 1.0 if _rank(own) > _rank(opp) else 0.0


def action_distribution(style: AgentStyle, game: Game, h: History) -> np.ndarray:
    """The style's mixed action choice at a Leduc decision node."""
    acts = h.legal_actions()
    wr = win_rate(game, h.infoset_key())
    probs = np.zeros(len(acts))

    def put(action, weight=1.0):
        probs[acts.index(action)] += weight

    aggressive = RAISE if RAISE in acts else CHECK_CALL
    passive = FOLD if FOLD in acts else CHECK_CALL
    if wr >= style.raise_above:
        put(aggressive)
    elif wr <= style.fold_below:
        if style.bluff_prob > 0.0:
            put(aggressive, style.bluff_prob)
            put(passive, 1.0 - style.bluff_prob)
        else:
            put(passive)
    else:
        put(CHECK_CALL)
    return probs


def act(style: AgentStyle, game: Game, h: History, rng: np.random.Generator) -> int:
    """Sample the style's action for the current decision node."""
    probs = action_distribution(style, game, h)
    acts = h.legal_actions()
    return acts[sample_index(probs, rng)]


def rule_policy(style: AgentStyle) -> PolicyFn:
    return lambda game, h: action_distribution(style, game, h)


def tabular_policy_fn(policy: TabularPolicy) -> PolicyFn:
    return lambda game, h: policy.prob(h.infoset_key(), len(h.legal_actions()))


@dataclass(frozen=True)
class MatchResult:
    mean: float  # normalized reward per hand for the first policy
    half_width: float  # 95% confidence half-width
    matches: int


def _play_hand(game: Game, seat_policies, rng: np.random.Generator) -> float:
    h = game.root()
    while not h.terminal:
        if h.player == CHANCE:
            outcomes = h.chance_outcomes()
            h = h.apply(outcomes[sample_index([p for _, p in outcomes], rng)][0])
        else:
            probs = seat_policies[h.player](game, h)
            h = h.apply(h.legal_actions()[sample_index(probs, rng)])
    return game.normalize(h.utility(0))


def head2head(policy_a: PolicyFn, policy_b: PolicyFn, game: Game,
              n: int, seed: int) -> MatchResult:
    """Play n hands, alternating seats every hand; rewards are normalized."""
    if n < 1:
        raise ValueError("need at least one match")
    rng = np.random.default_rng(np.random.SeedSequence(entropy=(seed,)))
    rewards = np.empty(n)
    for k in range(n):
        if k % 2 == 0:
            rewards[k] = _play_hand(game, (policy_a, policy_b), rng)
        else:
            rewards[k] = -_play_hand(game, (policy_b, policy_a), rng)
    mean = float(rewards.mean())
    half = 1.96 * float(rewards.std(ddof=1)) / float(np.sqrt(n)) if n > 1 else float("inf")
    return MatchResult(mean=mean, half_width=half, matches=n)
