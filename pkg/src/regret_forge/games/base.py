"""Core abstractions for two-player zero-sum extensive-form games.

Every game exposes an immutable rules object (`Game`) and navigable
positions (`History`).  Histories are immutable: `apply()` returns a child
and never mutates the parent, so concurrent traversals can share them
freely.  Player indices are 0 and 1; `CHANCE` marks chance nodes.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple

import numpy as np

CHANCE = -1


class GameId(NamedTuple):
    """Identifier for a benchmark game, e.g. ('liars_dice', 5)."""

    name: str
    size: int | None = None

    def __str__(self) -> str:
        return self.name if self.size is None else f"{self.name}:{self.size}"


class InfoSetId(NamedTuple):
    """Canonical identity of one player's information set.

    `key` holds the owner's observation sequence as printable ASCII bytes;
    two histories map to the same InfoSetId iff the owner cannot tell them
    apart.
    """

    owner: int
    key: bytes

    def __str__(self) -> str:
        return f"{self.owner}:{self.key.decode('ascii')}"

    @classmethod
    def parse(cls, text: str) -> "InfoSetId":
        owner, _, key = text.partition(":")
        return cls(int(owner), key.encode("ascii"))


class GameStats(NamedTuple):
    num_histories: int
    num_infosets: int
    num_terminals: int
    depth: int
    max_infoset_size: int


class History:
    """One position in the game tree.

    Subclasses hold game-specific incremental state in __slots__ and are
    cheap to copy-on-apply.  `player` is 0/1 at decision nodes, CHANCE at
    chance nodes and undefined once `terminal` is True.
    """

    __slots__ = ("game", "player", "terminal", "plies")

    game: "Game"
    player: int
    terminal: bool
    plies: int

    def legal_actions(self) -> tuple[int, ...]:
        """Ordered decision actions; raises on chance or terminal nodes."""
        raise NotImplementedError

    def chance_outcomes(self) -> tuple[tuple[int, float], ...]:
        """(action, probability) pairs; raises unless this is a chance node."""
        raise NotImplementedError

    def apply(self, action: int) -> "History":
        """Child history after `action`; the parent is left untouched."""
        raise NotImplementedError

    def utility(self, player: int) -> float:
        """Raw (unnormalized) terminal utility for `player`."""
        raise NotImplementedError

    def infoset_key(self) -> InfoSetId:
        """InfoSetId of the acting player; raises on chance/terminal nodes."""
        raise NotImplementedError

    # -- shared guards -------------------------------------------------

    def _require_decision(self) -> None:
        if self.terminal:
            raise ValueError("terminal history has no decision")
        if self.player == CHANCE:
            raise ValueError("chance node has no player decision")

    def _require_chance(self) -> None:
        if self.terminal or self.player != CHANCE:
            raise ValueError("not a chance node")

    def _require_terminal(self) -> None:
        if not self.terminal:
            raise ValueError("utility is only defined at terminal histories")


class Game:
    """Immutable rules object; safe to share across threads and runs."""

    id: GameId
    num_players = 2
    # Size of the decision-action id space (network output width).
    num_actions: int
    # Fixed feature lengths for the two encoders.
    infoset_dim: int
    history_dim: int
    encoding_version = 1

    _max_abs_utility: float | None = None

    def root(self) -> History:
        raise NotImplementedError

    def encode_infoset(self, infoset: InfoSetId) -> np.ndarray:
        """Deterministic [0,1] feature vector parsed from the infoset key."""
        raise NotImplementedError

    def encode_history(self, h: History) -> np.ndarray:
        """Omniscient [0,1] feature vector (both privates + public line)."""
        raise NotImplementedError

    def max_abs_utility(self) -> float:
        """max_{z,i} |u_i(z)|, computed once by terminal enumeration."""
        if self._max_abs_utility is None:
            best = 0.0
            for h in walk(self):
                if h.terminal:
                    u = abs(h.utility(0))
                    if u > best:
                        best = u
            self._max_abs_utility = best
        return self._max_abs_utility

    def normalize(self, u: float) -> float:
        """Scale a raw utility into [-1, 1]."""
        return u / self.max_abs_utility()


def walk(game: Game) -> Iterable[History]:
    """Depth-first iteration over every history of an enumerable game."""
    stack = [game.root()]
    pop = stack.pop
    push = stack.append
    while stack:
        h = pop()
        yield h
        if h.terminal:
            continue
        if h.player == CHANCE:
            for a, _ in h.chance_outcomes():
                push(h.apply(a))
        else:
            for a in h.legal_actions():
                push(h.apply(a))


def enumerate_stats(game: Game) -> GameStats:
    """Exact tree statistics by full depth-first enumeration.

    Depth counts nodes on the longest root-to-terminal path (one more than
    the maximum number of actions in a history).
    """
    num_histories = 0
    num_terminals = 0
    max_plies = 0
    members: dict[InfoSetId, int] = {}
    for h in walk(game):
        num_histories += 1
        if h.plies > max_plies:
            max_plies = h.plies
        if h.terminal:
            num_terminals += 1
        elif h.player != CHANCE:
            key = h.infoset_key()
            members[key] = members.get(key, 0) + 1
    return GameStats(
        num_histories=num_histories,
        num_infosets=len(members),
        num_terminals=num_terminals,
        depth=max_plies + 1,
        max_infoset_size=max(members.values()),
    )


def one_hot(index: int, width: int) -> np.ndarray:
    v = np.zeros(width, dtype=np.float64)
    v[index] = 1.0
    return v
