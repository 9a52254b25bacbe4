"""Exact best response and exploitability over enumerable games.

All values are reported in normalized utility units ([-1, 1] scale) so
tabular and neural runs log on the same axis.
"""

from __future__ import annotations

import numpy as np

from .games import Game
from .tabular import TabularPolicy
from .tree import compiled


def best_response_value(game: Game, opponent: TabularPolicy, player: int) -> float:
    """Value of the exact best response for `player` against `opponent`.

    Computed by backward induction with opponent-and-chance reach
    aggregation per infoset; ties break toward the lowest action index.
    """
    flat = compiled(game)
    slots = flat.policy_slots(opponent)
    return flat.best_response_value(slots, player)


def exploitability(game: Game, policy: TabularPolicy) -> float:
    """Mean best-response gain against `policy`, in normalized units.

    `policy` covers both players; infosets it does not define play uniform.
    """
    flat = compiled(game)
    slots = flat.policy_slots(policy)
    return 0.5 * (flat.best_response_value(slots, 0) + flat.best_response_value(slots, 1))


def extract_policy(game: Game, source) -> TabularPolicy:
    """Materialize a queryable strategy into a tabular policy.

    `source(infoset, action_ids)` returns action values for every infoset;
    slightly off or negative rows are renormalized over their positive
    part, NaN rows are an error.
    """
    flat = compiled(game)
    policy = TabularPolicy()
    for k, key in enumerate(flat.iso_keys):
        row = np.asarray(source(key, flat.iso_action_ids[k]), dtype=np.float64)
        if row.shape != (flat.iso_nact[k],):
            raise ValueError(f"policy source returned shape {row.shape} for {key}")
        if not np.isfinite(row).all():
            raise ValueError(f"policy source returned non-finite values for {key}")
        total = row.sum()
        if np.any(row < 0.0) or abs(total - 1.0) > 1e-6:
            row = np.maximum(row, 0.0)
            total = row.sum()
            row = row / total if total > 0.0 else np.full(row.shape, 1.0 / row.size)
        else:
            row = row / total
        policy.set(key, row)
    return policy
