"""Benchmark games, information-set keys, encodings and exact enumeration.

Game selection grammar:
    kuhn | leduc | liars_dice:<x> | goofspiel_imp:<x> | battleship:<x>
"""

from __future__ import annotations

import numpy as np

from .base import (
    CHANCE,
    Game,
    GameId,
    GameStats,
    History,
    InfoSetId,
    enumerate_stats,
    walk,
)
from .battleship import BattleshipGame
from .goofspiel import GoofspielImpGame
from .kuhn import KuhnGame
from .leduc import LeducGame
from .liars_dice import LiarsDiceGame

_SIZED = {
    "liars_dice": (LiarsDiceGame, (5, 6)),
    "goofspiel_imp": (GoofspielImpGame, (5, 6)),
    "battleship": (BattleshipGame, (2, 3)),
}
_PLAIN = {"kuhn": KuhnGame, "leduc": LeducGame}

ALL_GAME_IDS = (
    GameId("kuhn"),
    GameId("leduc"),
    GameId("liars_dice", 5),
    GameId("liars_dice", 6),
    GameId("goofspiel_imp", 5),
    GameId("goofspiel_imp", 6),
    GameId("battleship", 2),
    GameId("battleship", 3),
)

_cache: dict[GameId, Game] = {}


def parse_game_id(text: str) -> GameId:
    name, sep, size = text.partition(":")
    if name in _PLAIN:
        if sep:
            raise ValueError(f"game {name!r} takes no size parameter")
        return GameId(name)
    if name in _SIZED:
        if not sep:
            raise ValueError(f"game {name!r} needs a size, e.g. {name}:5")
        return GameId(name, int(size))
    raise ValueError(f"unknown game {text!r}")


def new_game(game_id: GameId | str) -> Game:
    """Construct (and cache) the immutable rules object for a game id."""
    if isinstance(game_id, str):
        game_id = parse_game_id(game_id)
    if game_id in _cache:
        return _cache[game_id]
    if game_id.name in _PLAIN:
        if game_id.size is not None:
            raise ValueError(f"game {game_id.name!r} takes no size parameter")
        game = _PLAIN[game_id.name]()
    elif game_id.name in _SIZED:
        cls, sizes = _SIZED[game_id.name]
        if game_id.size not in sizes:
            raise ValueError(f"unsupported size {game_id.size} for {game_id.name}")
        game = cls(game_id.size)
    else:
        raise ValueError(f"unknown game {game_id!r}")
    _cache[game_id] = game
    return game


# Functional views of the History API, matching the operation contracts.

def legal_actions(h: History) -> tuple[int, ...]:
    return h.legal_actions()


def apply_action(h: History, action: int) -> History:
    return h.apply(action)


def utility(z: History, player: int) -> float:
    return z.utility(player)


def chance_outcomes(h: History) -> tuple[tuple[int, float], ...]:
    return h.chance_outcomes()


def infoset_key(h: History, player: int) -> InfoSetId:
    if h.terminal or h.player == CHANCE:
        raise ValueError("infoset keys exist only at decision nodes")
    if h.player != player:
        raise ValueError(f"player {player} is not acting here")
    return h.infoset_key()


def normalize_utility(game: Game, u: float) -> float:
    return game.normalize(u)


def encode_infoset(game: Game, infoset: InfoSetId) -> np.ndarray:
    return game.encode_infoset(infoset)


def encode_history(game: Game, h: History) -> np.ndarray:
    return game.encode_history(h)


__all__ = [
    "ALL_GAME_IDS",
    "CHANCE",
    "Game",
    "GameId",
    "GameStats",
    "History",
    "InfoSetId",
    "apply_action",
    "chance_outcomes",
    "encode_history",
    "encode_infoset",
    "enumerate_stats",
    "infoset_key",
    "legal_actions",
    "new_game",
    "normalize_utility",
    "parse_game_id",
    "utility",
    "walk",
]
