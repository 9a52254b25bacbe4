"""Shared fixtures and independent oracle helpers.

The oracle helpers here deliberately walk games through the public History
API with their own recursions, so tests can cross-check the array-based
solver machinery against an independent computation path.
"""

from __future__ import annotations

import numpy as np
import pytest

from regret_forge.games import CHANCE, Game, GameId, History, InfoSetId, new_game
from regret_forge.tabular import TabularPolicy, make_rule, run_cfr


# ----------------------------------------------------------------------
# Oracle helpers (independent of regret_forge.tree)
# ----------------------------------------------------------------------

def terminal_paths(game: Game) -> list[tuple[int, ...]]:
    """All root-to-terminal action sequences, in deterministic order."""
    paths: list[tuple[int, ...]] = []
    stack = [(game.root(), ())]
    while stack:
        h, acts = stack.pop()
        if h.terminal:
            paths.append(acts)
            continue
        if h.player == CHANCE:
            children = [a for a, _ in h.chance_outcomes()]
        else:
            children = list(h.legal_actions())
        for a in reversed(children):
            stack.append((h.apply(a), acts + (a,)))
    return paths


def expected_value(game: Game, h: History, policy: TabularPolicy, player: int) -> float:
    """Recursive expected normalized utility under a full profile."""
    if h.terminal:
        return game.normalize(h.utility(player))
    if h.player == CHANCE:
        return sum(p * expected_value(game, h.apply(a), policy, player)
                   for a, p in h.chance_outcomes())
    acts = h.legal_actions()
    probs = policy.prob(h.infoset_key(), len(acts))
    return sum(float(probs[i]) * expected_value(game, h.apply(a), policy, player)
               for i, a in enumerate(acts))


def infoset_tables(game: Game, policy: TabularPolicy, player: int):
    """Exact per-infoset counterfactual values and reaches.

    Returns dict InfoSetId -> (v_row, reach_opp_I, reach_full_I) where
    v_row are the counterfactual action values for `player` from a
    recursion over the History API; advantages follow as
    (v_row - sigma @ v_row)/reach_opp_I.
    """
    v_rows: dict[InfoSetId, np.ndarray] = {}
    reach_opp_tab: dict[InfoSetId, float] = {}
    reach_full_tab: dict[InfoSetId, float] = {}

    def walk(h: History, reach_own: float, reach_opp: float):
        if h.terminal:
            return
        if h.player == CHANCE:
            for a, p in h.chance_outcomes():
                walk(h.apply(a), reach_own, reach_opp * p)
            return
        acts = h.legal_actions()
        key = h.infoset_key()
        probs = policy.prob(key, len(acts))
        if h.player == player:
            row = v_rows.setdefault(key, np.zeros(len(acts)))
            for i, a in enumerate(acts):
                row[i] += reach_opp * expected_value(game, h.apply(a), policy, player)
            reach_opp_tab[key] = reach_opp_tab.get(key, 0.0) + reach_opp
            reach_full_tab[key] = reach_full_tab.get(key, 0.0) + reach_own * reach_opp
            for i, a in enumerate(acts):
                walk(h.apply(a), reach_own * float(probs[i]), reach_opp)
        else:
            for i, a in enumerate(acts):
                walk(h.apply(a), reach_own, reach_opp * float(probs[i]))

    walk(game.root(), 1.0, 1.0)
    return {key: (v_rows[key], reach_opp_tab[key], reach_full_tab[key]) for key in v_rows}


def path_reach(game: Game, actions, policy: TabularPolicy) -> float:
    """Probability of one root-to-terminal path under a full profile."""
    h = game.root()
    total = 1.0
    for a in actions:
        if h.player == CHANCE:
            total *= dict(h.chance_outcomes())[a]
        else:
            acts = h.legal_actions()
            total *= float(policy.prob(h.infoset_key(), len(acts))[acts.index(a)])
        h = h.apply(a)
    return total


def random_policy(game: Game, rng: np.random.Generator) -> TabularPolicy:
    """Dirichlet-random behavioral strategy over every infoset."""
    from regret_forge.tree import compiled

    flat = compiled(game)
    policy = TabularPolicy()
    for k, key in enumerate(flat.iso_keys):
        policy.set(key, rng.dirichlet(np.ones(int(flat.iso_nact[k]))))
    return policy


# ----------------------------------------------------------------------
# A one-decision-per-player test game (matching pennies)
# ----------------------------------------------------------------------

class PenniesHistory(History):
    __slots__ = ("picks",)

    def __init__(self, game, picks, player, terminal, plies):
        self.game = game
        self.picks = picks
        self.player = player
        self.terminal = terminal
        self.plies = plies

    def legal_actions(self):
        self._require_decision()
        return (0, 1)

    def chance_outcomes(self):
        self._require_chance()
        raise AssertionError("no chance nodes")

    def apply(self, action):
        if self.terminal:
            raise ValueError("cannot act at a terminal history")
        if action not in (0, 1):
            raise ValueError(f"illegal action {action}")
        picks = self.picks + (action,)
        done = len(picks) == 2
        return PenniesHistory(self.game, picks, 1 if not done else CHANCE,
                              done, self.plies + 1)

    def utility(self, player):
        self._require_terminal()
        u0 = 1.0 if self.picks[0] == self.picks[1] else -1.0
        return u0 if player == 0 else -u0

    def infoset_key(self):
        self._require_decision()
        return InfoSetId(self.player, b"")


class PenniesGame(Game):
    num_actions = 2
    infoset_dim = 3
    history_dim = 3

    def __init__(self):
        self.id = GameId("pennies")

    def root(self):
        return PenniesHistory(self, (), 0, False, 0)

    def encode_infoset(self, infoset):
        v = np.zeros(3)
        v[infoset.owner] = 1.0
        v[2] = 1.0
        return v

    def encode_history(self, h):
        v = np.zeros(3)
        if h.picks:
            v[h.picks[0]] = 1.0
        v[2] = float(len(h.picks))/2.0
        return v


# ----------------------------------------------------------------------
# Session-scoped fixtures
# ----------------------------------------------------------------------

@pytest.fixture(scope="session")
def kuhn():
    return new_game("kuhn")


@pytest.fixture(scope="session")
def leduc():
    return new_game("leduc")


@pytest.fixture(scope="session")
def kuhn_ne_policy(kuhn):
    """Near-exact Kuhn equilibrium from a deeply converged predictive run."""
    policy, log = run_cfr(kuhn, make_rule("pcfr+"), 10_000)
    assert log[-1][1] < 1e-9
    return policy


@pytest.fixture(scope="session")
def leduc_cfrplus_policy(leduc):
    """Converged tabular CFR+ Leduc strategy for head-to-head checks."""
    policy, log = run_cfr(leduc, make_rule("cfr+"), 2000)
    assert log[-1][1] < 1e-5
    return policy
