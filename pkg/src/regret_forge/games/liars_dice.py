"""Liar's Dice with one x-sided die per player.

Bids claim "at least p dice show face q" with p in {1,2} and q in 1..x,
totally ordered lexicographically by (p, q); each bid must exceed the last
and the highest face is wild.  Calling "liar" ends the game: the caller
wins iff the final bid is unsatisfied.  Winner +1, loser -1.
"""

from __future__ import annotations

import numpy as np

from .base import CHANCE, Game, GameId, History, InfoSetId


class LiarsDiceHistory(History):
    __slots__ = ("dice", "bids")

    def __init__(self, game, dice, bids, player, terminal, plies):
        self.game = game
        self.dice = dice
        self.bids = bids
        self.player = player
        self.terminal = terminal
        self.plies = plies

    def chance_outcomes(self):
        self._require_chance()
        x = self.game.sides
        p = 1.0 / x
        return tuple((f, p) for f in range(x))

    def legal_actions(self):
        self._require_decision()
        game = self.game
        start = self.bids[-1] + 1 if self.bids else 0
        acts = tuple(range(start, game.num_bids))
        if self.bids:
            acts = acts + (game.liar_action,)
        return acts

    def apply(self, action):
        if self.terminal:
            raise ValueError("cannot act at a terminal history")
        plies = self.plies + 1
        g = self.game
        if self.player == CHANCE:
            if not 0 <= action < g.sides:
                raise ValueError(f"illegal chance outcome {action}")
            dice = self.dice + (action,)
            player = 0 if len(dice) == 2 else CHANCE
            return LiarsDiceHistory(g, dice, (), player, False, plies)
        if action not in self.legal_actions():
            raise ValueError(f"illegal action {action}")
        if action == g.liar_action:
            return LiarsDiceHistory(g, self.dice, self.bids, self.player, True, plies)
        return LiarsDiceHistory(g, self.dice, self.bids + (action,),
                                1 - self.player, False, plies)

    def utility(self, player):
        self._require_terminal()
        g = self.game
        caller = self.player  # player attribute frozen at the liar call
        count_needed = 1 + self.bids[-1] // g.sides
        face = self.bids[-1] % g.sides
        wild = g.sides - 1
        count = sum(1 for d in self.dice if d == face or d == wild)
        satisfied = count >= count_needed
        u_caller = -1.0 if satisfied else 1.0
        u0 = u_caller if caller == 0 else -u_caller
        return u0 if player == 0 else -u0

    def infoset_key(self):
        self._require_decision()
        bid_s = ".".join(str(b) for b in self.bids)
        return InfoSetId(self.player, f"{self.dice[self.player]}|{bid_s}".encode("ascii"))


class LiarsDiceGame(Game):
    def __init__(self, sides: int):
        if sides not in (5, 6):
            raise ValueError(f"unsupported liars_dice size {sides}")
        self.id = GameId("liars_dice", sides)
        self.sides = sides
        self.num_bids = 2 * sides
        self.liar_action = self.num_bids
        self.num_actions = self.num_bids + 1
        self.infoset_dim = 2 + sides + self.num_bids * self.num_bids
        self.history_dim = 2 * sides + self.num_bids * self.num_bids

    def root(self):
        return LiarsDiceHistory(self, (), (), CHANCE, False, 0)

    def encode_infoset(self, infoset):
        die_s, _, bid_s = infoset.key.decode("ascii").partition("|")
        v = np.zeros(self.infoset_dim)
        v[infoset.owner] = 1.0
        v[2 + int(die_s)] = 1.0
        base = 2 + self.sides
        if bid_s:
            for i, b in enumerate(bid_s.split(".")):
                v[base + i * self.num_bids + int(b)] = 1.0
        return v

    def encode_history(self, h):
        if h.terminal or h.player == CHANCE:
            raise ValueError("history encoding is defined at decision nodes")
        v = np.zeros(self.history_dim)
        v[h.dice[0]] = 1.0
        v[self.sides + h.dice[1]] = 1.0
        base = 2 * self.sides
        for i, b in enumerate(h.bids):
            v[base + i * self.num_bids + b] = 1.0
        return v
