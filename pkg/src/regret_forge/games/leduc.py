"""Leduc poker: six cards (two suits, three ranks), two betting rounds.

Round one allows bets of two chips, round two bets of four; each round
permits at most two raises (the opening bet counts as a raise).  A private
card paired with the community card beats everything, otherwise the higher
rank wins and equal ranks split the pot.
"""

from __future__ import annotations

import numpy as np

from .base import CHANCE, Game, GameId, History, InfoSetId

FOLD, CHECK_CALL, RAISE = 0, 1, 2

_ACT_CHAR = {FOLD: "f", CHECK_CALL: "c", RAISE: "r"}
_BET_SIZE = (2, 4)
_MAX_RAISES = 2
_MAX_STEPS = 4  # per round: check, raise, raise, call
_NUM_CARDS = 6


def _rank(card: int) -> int:
    return card >> 1


class LeducHistory(History):
    __slots__ = ("cards", "community", "rnd", "seqs", "contrib", "facing", "raises", "_folder")

    def __init__(self, game, cards, community, rnd, seqs, contrib, facing, raises,
                 player, terminal, plies, folder):
        self.game = game
        self.cards = cards
        self.community = community
        self.rnd = rnd
        self.seqs = seqs
        self.contrib = contrib
        self.facing = facing
        self.raises = raises
        self.player = player
        self.terminal = terminal
        self.plies = plies
        self._folder = folder

    def chance_outcomes(self):
        self._require_chance()
        if len(self.cards) < 2:
            dealt = self.cards
            left = [c for c in range(_NUM_CARDS) if c not in dealt]
        else:
            left = [c for c in range(_NUM_CARDS) if c not in self.cards]
        p = 1.0 / len(left)
        return tuple((c, p) for c in left)

    def legal_actions(self):
        self._require_decision()
        acts = [CHECK_CALL]
        if self.facing:
            acts.insert(0, FOLD)
        if self.raises < _MAX_RAISES:
            acts.append(RAISE)
        return tuple(acts)

    def apply(self, action):
        if self.terminal:
            raise ValueError("cannot act at a terminal history")
        plies = self.plies + 1
        g = self.game
        if self.player == CHANCE:
            if action not in (c for c, _ in self.chance_outcomes()):
                raise ValueError(f"illegal chance outcome {action}")
            if len(self.cards) < 2:
                cards = self.cards + (action,)
                if len(cards) < 2:
                    return LeducHistory(g, cards, None, 0, ((), ()), self.contrib,
                                        False, 0, CHANCE, False, plies, None)
                return LeducHistory(g, cards, None, 0, ((), ()), self.contrib,
                                    False, 0, 0, False, plies, None)
            # community card: start round two
            return LeducHistory(g, self.cards, action, 1, self.seqs, self.contrib,
                                False, 0, 0, False, plies, None)
        if action not in self.legal_actions():
            raise ValueError(f"illegal action {action}")
        p = self.player
        seqs = list(self.seqs)
        seqs[self.rnd] = seqs[self.rnd] + (action,)
        seqs = tuple(seqs)
        contrib = list(self.contrib)
        to_match = self.contrib[1 - p] - self.contrib[p]
        if action == FOLD:
            return LeducHistory(g, self.cards, self.community, self.rnd, seqs, self.contrib,
                                self.facing, self.raises, CHANCE, True, plies, p)
        if action == RAISE:
            contrib[p] += to_match + _BET_SIZE[self.rnd]
            return LeducHistory(g, self.cards, self.community, self.rnd, seqs, tuple(contrib),
                                True, self.raises + 1, 1 - p, False, plies, None)
        # check or call
        contrib[p] += to_match
        round_over = self.facing or len(seqs[self.rnd]) == 2
        if not round_over:
            return LeducHistory(g, self.cards, self.community, self.rnd, seqs, tuple(contrib),
                                False, 0, 1 - p, False, plies, None)
        if self.rnd == 0:
            return LeducHistory(g, self.cards, self.community, 0, seqs, tuple(contrib),
                                False, 0, CHANCE, False, plies, None)
        return LeducHistory(g, self.cards, self.community, 1, seqs, tuple(contrib),
                            False, 0, CHANCE, True, plies, None)

    def _showdown_sign(self):
        c0, c1 = self.cards
        comm = self.community
        if _rank(c0) == _rank(comm):
            return 1
        if _rank(c1) == _rank(comm):
            return -1
        if _rank(c0) != _rank(c1):
            return 1 if _rank(c0) > _rank(c1) else -1
        return 0

    def utility(self, player):
        self._require_terminal()
        if self._folder is not None:
            u0 = float(self.contrib[1]) if self._folder == 1 else -float(self.contrib[0])
        else:
            u0 = self._showdown_sign() * float(self.contrib[0])
        return u0 if player == 0 else -u0

    def infoset_key(self):
        self._require_decision()
        own = self.cards[self.player]
        comm = "?" if self.community is None else str(self.community)
        s0 = "".join(_ACT_CHAR[a] for a in self.seqs[0])
        s1 = "".join(_ACT_CHAR[a] for a in self.seqs[1])
        return InfoSetId(self.player, f"{own}|{comm}|{s0}/{s1}".encode("ascii"))


class LeducGame(Game):
    num_actions = 3
    infoset_dim = 2 + _NUM_CARDS + _NUM_CARDS + 2 * _MAX_STEPS * 3
    history_dim = 3 * _NUM_CARDS + 2 * _MAX_STEPS * 3

    def __init__(self):
        self.id = GameId("leduc")

    def root(self):
        # One ante already posted by each player.
        return LeducHistory(self, (), None, 0, ((), ()), (1, 1),
                            False, 0, CHANCE, False, 0, None)

    def encode_infoset(self, infoset):
        own_s, comm_s, seqs = infoset.key.decode("ascii").split("|")
        s0, _, s1 = seqs.partition("/")
        v = np.zeros(self.infoset_dim)
        v[infoset.owner] = 1.0
        v[2 + int(own_s)] = 1.0
        if comm_s != "?":
            v[8 + int(comm_s)] = 1.0
        base = 14
        for rnd, s in enumerate((s0, s1)):
            for i, ch in enumerate(s):
                v[base + rnd * _MAX_STEPS * 3 + i * 3 + "fcr".index(ch)] = 1.0
        return v

    def encode_history(self, h):
        if h.terminal or h.player == CHANCE:
            raise ValueError("history encoding is defined at decision nodes")
        v = np.zeros(self.history_dim)
        v[h.cards[0]] = 1.0
        v[6 + h.cards[1]] = 1.0
        if h.community is not None:
            v[12 + h.community] = 1.0
        base = 18
        for rnd, seq in enumerate(h.seqs):
            for i, a in enumerate(seq):
                v[base + rnd * _MAX_STEPS * 3 + i * 3 + a] = 1.0
        return v
