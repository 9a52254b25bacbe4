"""Battleship on a 2-by-x grid with one 1x2 ship of value 2 per player.

Both players place their ship secretly (modeled as sequential hidden
moves), then alternate shots starting with player 0, three shots each.
The game ends as soon as a ship has been hit on both cells or when all
six shots are spent.  Sinking the opponent's ship scores +2 / -2,
otherwise the game is a 0/0 draw.  A shooter may not repeat a cell and
learns hit or miss after every shot.
"""

from __future__ import annotations

import numpy as np

from .base import CHANCE, Game, GameId, History, InfoSetId

_SHOTS_EACH = 3


def _placements(width: int) -> tuple[tuple[int, int], ...]:
    cells = []
    for row in (0, 1):
        for col in range(width - 1):
            cells.append((row * width + col, row * width + col + 1))
    for col in range(width):
        cells.append((col, width + col))
    return tuple(cells)


class BattleshipHistory(History):
    __slots__ = ("ships", "shots", "obs", "_winner")

    def __init__(self, game, ships, shots, obs, player, terminal, plies, winner):
        self.game = game
        self.ships = ships
        self.shots = shots  # per-player tuple of cells fired at the opponent
        self.obs = obs  # per-player public shot log with own-shot outcomes
        self.player = player
        self.terminal = terminal
        self.plies = plies
        self._winner = winner

    def legal_actions(self):
        self._require_decision()
        g = self.game
        if len(self.ships) < 2:
            return tuple(range(len(g.placements)))
        mine = self.shots[self.player]
        return tuple(g.shot_base + c for c in range(2 * g.width) if c not in mine)

    def chance_outcomes(self):
        self._require_chance()
        raise AssertionError("unreachable: battleship has no chance nodes")

    def apply(self, action):
        if self.terminal:
            raise ValueError("cannot act at a terminal history")
        if action not in self.legal_actions():
            raise ValueError(f"illegal action {action}")
        g = self.game
        plies = self.plies + 1
        if len(self.ships) < 2:
            ships = self.ships + (action,)
            return BattleshipHistory(g, ships, ((), ()), ("", ""),
                                     1 - self.player, False, plies, None)
        p = self.player
        cell = action - g.shot_base
        shots = list(self.shots)
        shots[p] = shots[p] + (cell,)
        shots = tuple(shots)
        target = g.placements[self.ships[1 - p]]
        hit = cell in target
        sep0 = "." if self.obs[0] else ""
        sep1 = "." if self.obs[1] else ""
        own_tok = f"{cell}{'h' if hit else 'm'}"
        obs = (
            self.obs[0] + sep0 + (own_tok if p == 0 else str(cell)),
            self.obs[1] + sep1 + (own_tok if p == 1 else str(cell)),
        )
        if hit and all(c in shots[p] for c in target):
            return BattleshipHistory(g, self.ships, shots, obs, CHANCE, True, plies, p)
        if len(shots[0]) + len(shots[1]) == 2 * _SHOTS_EACH:
            return BattleshipHistory(g, self.ships, shots, obs, CHANCE, True, plies, None)
        return BattleshipHistory(g, self.ships, shots, obs, 1 - p, False, plies, None)

    def utility(self, player):
        self._require_terminal()
        if self._winner is None:
            return 0.0
        return 2.0 if player == self._winner else -2.0

    def infoset_key(self):
        self._require_decision()
        p = self.player
        own = str(self.ships[p]) if len(self.ships) > p else "?"
        return InfoSetId(p, f"{own}|{self.obs[p] if len(self.ships) == 2 else ''}".encode("ascii"))


class BattleshipGame(Game):
    def __init__(self, width: int):
        if width not in (2, 3):
            raise ValueError(f"unsupported battleship size {width}")
        self.id = GameId("battleship", width)
        self.width = width
        self.placements = _placements(width)
        self.shot_base = len(self.placements)
        self.num_actions = self.shot_base + 2 * width
        step = 2 * width + 2  # cell one-hot + hit/miss flags for own shots
        self.infoset_dim = 2 + self.shot_base + 2 * _SHOTS_EACH * step
        self.history_dim = 2 * self.shot_base + 2 * _SHOTS_EACH * 2 * width

    def root(self):
        return BattleshipHistory(self, (), ((), ()), ("", ""), 0, False, 0, None)

    def encode_infoset(self, infoset):
        own_s, _, log = infoset.key.decode("ascii").partition("|")
        v = np.zeros(self.infoset_dim)
        v[infoset.owner] = 1.0
        if own_s != "?":
            v[2 + int(own_s)] = 1.0
        base = 2 + self.shot_base
        step = 2 * self.width + 2
        if log:
            for i, tok in enumerate(log.split(".")):
                if tok[-1] in "hm":
                    v[base + i * step + int(tok[:-1])] = 1.0
                    v[base + i * step + 2 * self.width + (0 if tok[-1] == "h" else 1)] = 1.0
                else:
                    v[base + i * step + int(tok)] = 1.0
        return v

    def encode_history(self, h):
        if h.terminal:
            raise ValueError("history encoding is defined at decision nodes")
        v = np.zeros(self.history_dim)
        for p, ship in enumerate(h.ships):
            v[p * self.shot_base + ship] = 1.0
        base = 2 * self.shot_base
        cells = 2 * self.width
        seq = []
        for k in range(max(len(h.shots[0]), len(h.shots[1])) * 2):
            p, i = k % 2, k // 2
            if i < len(h.shots[p]):
                seq.append(h.shots[p][i])
        for i, cell in enumerate(seq):
            v[base + i * cells + cell] = 1.0
        return v
