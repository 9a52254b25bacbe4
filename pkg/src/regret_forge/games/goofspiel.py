"""Imperfect-information Goofspiel with a fixed descending point deck.

Each round both players secretly bid one card from 1..x for the current
point card (worth x, x-1, ... in order); the higher bid takes the points,
ties discard the card.  Players observe only win/lose/tie, never the
opponent's card.  The final round is forced (one card each) and is
resolved automatically, so play ends after x-1 bidding rounds.  The player
with more points scores +1, the other -1, equal points 0.

The fixed deck means the game has no chance nodes.
"""

from __future__ import annotations

import numpy as np

from .base import Game, GameId, History, InfoSetId

_OUTCOME = ("w", "l", "t")


def _outcome_char(own: int, other: int) -> str:
    if own == other:
        return "t"
    return "w" if own > other else "l"


class GoofspielHistory(History):
    __slots__ = ("picks", "scores", "obs")

    def __init__(self, game, picks, scores, obs, player, terminal, plies):
        self.game = game
        self.picks = picks
        self.scores = scores
        self.obs = obs  # per-player observation strings, e.g. "4w.2l"
        self.player = player
        self.terminal = terminal
        self.plies = plies

    def _hand(self, player):
        used = self.picks[player::2]
        return tuple(c for c in range(self.game.cards) if c not in used)

    def legal_actions(self):
        self._require_decision()
        return self._hand(self.player)

    def chance_outcomes(self):
        self._require_chance()
        raise AssertionError("unreachable: goofspiel has no chance nodes")

    def apply(self, action):
        if self.terminal:
            raise ValueError("cannot act at a terminal history")
        if action not in self.legal_actions():
            raise ValueError(f"illegal action {action}")
        g = self.game
        picks = self.picks + (action,)
        plies = self.plies + 1
        if len(picks) % 2 == 1:
            return GoofspielHistory(g, picks, self.scores, self.obs, 1, False, plies)
        rounds_done = len(picks) // 2
        c0, c1 = picks[-2], picks[-1]
        scores = _award(self.scores, c0, c1, g.cards - rounds_done + 1)
        obs = (
            self.obs[0] + ("." if self.obs[0] else "") + f"{c0}{_outcome_char(c0, c1)}",
            self.obs[1] + ("." if self.obs[1] else "") + f"{c1}{_outcome_char(c1, c0)}",
        )
        if rounds_done < g.cards - 1:
            return GoofspielHistory(g, picks, scores, obs, 0, False, plies)
        # Last round is forced: resolve it for the single remaining cards.
        l0 = next(c for c in range(g.cards) if c not in picks[0::2])
        l1 = next(c for c in range(g.cards) if c not in picks[1::2])
        scores = _award(scores, l0, l1, 1)
        return GoofspielHistory(g, picks, scores, obs, 0, True, plies)

    def utility(self, player):
        self._require_terminal()
        s0, s1 = self.scores
        u0 = 0.0 if s0 == s1 else (1.0 if s0 > s1 else -1.0)
        return u0 if player == 0 else -u0

    def infoset_key(self):
        self._require_decision()
        return InfoSetId(self.player, self.obs[self.player].encode("ascii"))


def _award(scores, c_own, c_other, points):
    if c_own == c_other:
        return scores
    if c_own > c_other:
        return (scores[0] + points, scores[1])
    return (scores[0], scores[1] + points)


class GoofspielImpGame(Game):
    def __init__(self, cards: int):
        if cards not in (5, 6):
            raise ValueError(f"unsupported goofspiel_imp size {cards}")
        self.id = GameId("goofspiel_imp", cards)
        self.cards = cards
        self.num_actions = cards
        step = cards + 3  # card one-hot + w/l/t
        self.infoset_dim = 2 + (cards - 1) * step
        self.history_dim = 2 * (cards - 1) * cards

    def root(self):
        return GoofspielHistory(self, (), (0, 0), ("", ""), 0, False, 0)

    def encode_infoset(self, infoset):
        v = np.zeros(self.infoset_dim)
        v[infoset.owner] = 1.0
        obs = infoset.key.decode("ascii")
        if obs:
            step = self.cards + 3
            for i, tok in enumerate(obs.split(".")):
                v[2 + i * step + int(tok[:-1])] = 1.0
                v[2 + i * step + self.cards + _OUTCOME.index(tok[-1])] = 1.0
        return v

    def encode_history(self, h):
        if h.terminal:
            raise ValueError("history encoding is defined at decision nodes")
        v = np.zeros(self.history_dim)
        for i, c in enumerate(h.picks):
            v[i * self.cards + c] = 1.0
        return v
