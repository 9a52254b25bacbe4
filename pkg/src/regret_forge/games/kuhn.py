"""Kuhn poker: three cards, one ante, a single one-chip betting round."""

from __future__ import annotations

import numpy as np

from .base import CHANCE, Game, GameId, History, InfoSetId

FOLD, CHECK_CALL, BET = 0, 1, 2

_CARDS = "JQK"
_ACT_CHAR = {FOLD: "f", CHECK_CALL: "c", BET: "b"}
_MAX_STEPS = 3  # longest betting line: check, bet, call


class KuhnHistory(History):
    __slots__ = ("cards", "seq", "_folder")

    def __init__(self, game, cards, seq, player, terminal, plies, folder):
        self.game = game
        self.cards = cards
        self.seq = seq
        self.player = player
        self.terminal = terminal
        self.plies = plies
        self._folder = folder

    def chance_outcomes(self):
        self._require_chance()
        if not self.cards:
            return tuple((c, 1.0 / 3.0) for c in range(3))
        return tuple((c, 0.5) for c in range(3) if c != self.cards[0])

    def legal_actions(self):
        self._require_decision()
        if self.seq and self.seq[-1] == BET:
            return (FOLD, CHECK_CALL)
        return (CHECK_CALL, BET)

    def apply(self, action):
        if self.terminal:
            raise ValueError("cannot act at a terminal history")
        plies = self.plies + 1
        if self.player == CHANCE:
            if action not in (c for c, _ in self.chance_outcomes()):
                raise ValueError(f"illegal chance outcome {action}")
            cards = self.cards + (action,)
            player = 0 if len(cards) == 2 else CHANCE
            return KuhnHistory(self.game, cards, (), player, False, plies, None)
        if action not in self.legal_actions():
            raise ValueError(f"illegal action {action}")
        seq = self.seq + (action,)
        folder = None
        terminal = False
        if action == FOLD:
            terminal = True
            folder = self.player
        elif len(seq) == 2 and seq != (CHECK_CALL, BET):
            terminal = True  # cc or bc
        elif len(seq) == 3:
            terminal = True  # cbc
        player = CHANCE if terminal else 1 - self.player
        return KuhnHistory(self.game, self.cards, seq, player, terminal, plies, folder)

    def utility(self, player):
        self._require_terminal()
        if self._folder is not None:
            u0 = 1.0 if self._folder == 1 else -1.0
        else:
            pot = 2.0 if BET in self.seq else 1.0
            u0 = pot if self.cards[0] > self.cards[1] else -pot
        return u0 if player == 0 else -u0

    def infoset_key(self):
        self._require_decision()
        bets = "".join(_ACT_CHAR[a] for a in self.seq)
        key = f"{_CARDS[self.cards[self.player]]}|{bets}"
        return InfoSetId(self.player, key.encode("ascii"))


class KuhnGame(Game):
    num_actions = 3
    infoset_dim = 2 + 3 + _MAX_STEPS * 3
    history_dim = 3 + 3 + _MAX_STEPS * 3

    def __init__(self):
        self.id = GameId("kuhn")

    def root(self):
        return KuhnHistory(self, (), (), CHANCE, False, 0, None)

    def encode_infoset(self, infoset):
        card_s, _, bets = infoset.key.decode("ascii").partition("|")
        v = np.zeros(self.infoset_dim)
        v[infoset.owner] = 1.0
        v[2 + _CARDS.index(card_s)] = 1.0
        for i, ch in enumerate(bets):
            v[5 + i * 3 + "fcb".index(ch)] = 1.0
        return v

    def encode_history(self, h):
        if h.terminal or h.player == CHANCE:
            raise ValueError("history encoding is defined at decision nodes")
        v = np.zeros(self.history_dim)
        v[h.cards[0]] = 1.0
        v[3 + h.cards[1]] = 1.0
        for i, a in enumerate(h.seq):
            v[6 + i * 3 + a] = 1.0
        return v
