"""Flattened game trees for array-based solver sweeps.

`compile_game` enumerates an entire game once into flat numpy arrays:
nodes grouped by depth, edges contiguous per parent, and information sets
mapped to contiguous (infoset, action) slots.  Full-tree passes (reach
probabilities, expected values, best response) then run level by level as
vector operations instead of per-node recursion.

Terminal utilities are stored normalized to [-1, 1], so everything built
on top reports values in normalized units.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .games import CHANCE, Game, GameId, InfoSetId

TERMINAL = -2


@dataclass
class FlatGame:
    game: Game
    # nodes, index 0 = root, grouped by depth
    player: np.ndarray  # int8: 0/1 decision, -1 chance, -2 terminal
    util0: np.ndarray  # normalized player-0 utility at terminals
    node_iso: np.ndarray  # int32 infoset index, -1 for non-decision nodes
    # edges sorted by (parent depth, parent); children of a node contiguous
    edge_parent: np.ndarray
    edge_child: np.ndarray
    edge_slot: np.ndarray  # (infoset, action) slot, -1 on chance edges
    edge_prob: np.ndarray  # chance probability, 0 on decision edges
    # per-level bookkeeping (level = parent depth)
    lv_edges: list[tuple[int, int]]
    lv_seg_starts: list[np.ndarray]
    lv_seg_parents: list[np.ndarray]
    lv_dec: list[tuple[np.ndarray, np.ndarray]]  # per level: owner-0 / owner-1 edge idx
    lv_chance: list[np.ndarray]
    lv_isos: list[np.ndarray]
    # information sets, in discovery order
    iso_keys: list[InfoSetId]
    iso_index: dict[InfoSetId, int]
    iso_owner: np.ndarray
    iso_nact: np.ndarray
    iso_off: np.ndarray
    iso_action_ids: list[tuple[int, ...]]
    slot_iso: np.ndarray
    num_slots: int
    path_index: dict[tuple[int, ...], int] | None = None
    _iso_members: list[np.ndarray] | None = field(default=None, repr=False)

    @property
    def num_nodes(self) -> int:
        return len(self.player)

    def uniform_slots(self) -> np.ndarray:
        return 1.0 / np.repeat(self.iso_nact, self.iso_nact)

    def iso_members(self, iso: int) -> np.ndarray:
        if self._iso_members is None:
            order = np.argsort(self.node_iso, kind="stable")
            members: list[np.ndarray] = [np.empty(0, dtype=np.int64)] * len(self.iso_keys)
            sorted_iso = self.node_iso[order]
            bounds = np.searchsorted(sorted_iso, np.arange(len(self.iso_keys) + 1))
            for k in range(len(self.iso_keys)):
                members[k] = order[bounds[k]:bounds[k + 1]]
            self._iso_members = members
        return self._iso_members[iso]

    def slots_of(self, iso: int) -> slice:
        off = self.iso_off[iso]
        return slice(off, off + self.iso_nact[iso])

    def policy_slots(self, policy) -> np.ndarray:
        """Materialize an infoset-keyed policy into the slot layout.

        `policy` is anything with .prob(InfoSetId, n_actions) -> vector.
        """
        slots = np.empty(self.num_slots)
        for k, key in enumerate(self.iso_keys):
            slots[self.slots_of(k)] = policy.prob(key, int(self.iso_nact[k]))
        return slots

    # ------------------------------------------------------------------
    # Tree sweeps
    # ------------------------------------------------------------------

    def reach(self, slots: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Per-node reach split into player-0, player-1 and chance factors."""
        n = self.num_nodes
        r0 = np.zeros(n)
        r1 = np.zeros(n)
        rc = np.zeros(n)
        r0[0] = r1[0] = rc[0] = 1.0
        for lv, (a, b) in enumerate(self.lv_edges):
            pe = self.edge_parent[a:b]
            ce = self.edge_child[a:b]
            r0[ce] = r0[pe]
            r1[ce] = r1[pe]
            rc[ce] = rc[pe]
            d0, d1 = self.lv_dec[lv]
            if d0.size:
                r0[ce[d0]] *= slots[self.edge_slot[a:b][d0]]
            if d1.size:
                r1[ce[d1]] *= slots[self.edge_slot[a:b][d1]]
            ch = self.lv_chance[lv]
            if ch.size:
                rc[ce[ch]] *= self.edge_prob[a:b][ch]
        return r0, r1, rc

    def values(self, slots: np.ndarray, player: int) -> np.ndarray:
        """Expected normalized utility of `player` at every node under `slots`."""
        val = np.where(self.player == TERMINAL, self.util0 if player == 0 else -self.util0, 0.0)
        for lv in range(len(self.lv_edges) - 1, -1, -1):
            a, b = self.lv_edges[lv]
            w = np.where(self.edge_slot[a:b] >= 0,
                         slots[self.edge_slot[a:b]], self.edge_prob[a:b])
            contrib = w * val[self.edge_child[a:b]]
            val[self.lv_seg_parents[lv]] = np.add.reduceat(contrib, self.lv_seg_starts[lv])
        return val

    def best_response_value(self, slots: np.ndarray, responder: int) -> float:
        """Exact best-response value for `responder` against `slots`.

        Action choices are aggregated per infoset with opponent-and-chance
        reach weights; ties break toward the lowest action index.
        """
        r0, r1, rc = self.reach(slots)
        reach_mi = (r1 if responder == 0 else r0) * rc
        val = np.where(self.player == TERMINAL,
                       self.util0 if responder == 0 else -self.util0, 0.0)
        q = np.zeros(self.num_slots)
        for lv in range(len(self.lv_edges) - 1, -1, -1):
            a, b = self.lv_edges[lv]
            pe = self.edge_parent[a:b]
            ce = self.edge_child[a:b]
            es = self.edge_slot[a:b]
            child_val = val[ce]
            w = np.where(es >= 0, slots.take(es, mode="clip"), self.edge_prob[a:b])
            own = self.lv_dec[lv][responder]
            if own.size:
                w[own] = 0.0
            val[self.lv_seg_parents[lv]] = np.add.reduceat(w * child_val, self.lv_seg_starts[lv])
            if own.size:
                np.add.at(q, es[own], reach_mi[pe[own]] * child_val[own])
                chosen = np.empty(len(self.iso_keys), dtype=np.int64)
                for k in self.lv_isos[lv]:
                    if self.iso_owner[k] == responder:
                        s = self.slots_of(k)
                        chosen[k] = s.start + int(np.argmax(q[s]))
                pick = es[own] == chosen[self.slot_iso[es[own]]]
                val[pe[own][pick]] = child_val[own][pick]
        return float(val[0])


def compile_game(game: Game, with_paths: bool = False) -> FlatGame:
    """Enumerate `game` into a FlatGame (breadth-first, deterministic)."""
    player_l: list[int] = []
    util0_l: list[float] = []
    node_iso_l: list[int] = []
    edge_parent: list[int] = []
    edge_child: list[int] = []
    edge_slot: list[int] = []
    edge_prob: list[float] = []
    lv_edges: list[tuple[int, int]] = []
    lv_seg_starts: list[np.ndarray] = []
    lv_seg_parents: list[np.ndarray] = []
    lv_dec: list[tuple[np.ndarray, np.ndarray]] = []
    lv_chance: list[np.ndarray] = []
    lv_isos: list[np.ndarray] = []

    iso_keys: list[InfoSetId] = []
    iso_index: dict[InfoSetId, int] = {}
    iso_owner: list[int] = []
    iso_nact: list[int] = []
    iso_off: list[int] = []
    iso_action_ids: list[tuple[int, ...]] = []
    iso_level: list[int] = []
    num_slots = 0

    scale = game.max_abs_utility()
    root = game.root()
    level = [(0, root, ())]  # (node id, history, path)
    paths: dict[tuple[int, ...], int] | None = {(): 0} if with_paths else None
    next_id = 1
    depth = 0

    def register(h, nid, path) -> None:
        nonlocal next_id
        player_l.append(TERMINAL if h.terminal else h.player)
        util0_l.append(h.utility(0) / scale if h.terminal else 0.0)
        node_iso_l.append(-1)

    register(root, 0, ())
    while level:
        estart = len(edge_parent)
        seg_starts: list[int] = []
        seg_parents: list[int] = []
        d0_idx: list[int] = []
        d1_idx: list[int] = []
        ch_idx: list[int] = []
        level_isos: set[int] = set()
        next_level: list[tuple[int, object, tuple]] = []
        for nid, h, path in level:
            if h.terminal:
                continue
            seg_starts.append(len(edge_parent) - estart)
            seg_parents.append(nid)
            if h.player == CHANCE:
                for a, p in h.chance_outcomes():
                    ch_idx.append(len(edge_parent) - estart)
                    edge_parent.append(nid)
                    edge_child.append(next_id)
                    edge_slot.append(-1)
                    edge_prob.append(p)
                    child = h.apply(a)
                    cpath = path + (a,) if with_paths else ()
                    register(child, next_id, cpath)
                    if paths is not None:
                        paths[cpath] = next_id
                    next_level.append((next_id, child, cpath))
                    next_id += 1
            else:
                key = h.infoset_key()
                k = iso_index.get(key)
                acts = h.legal_actions()
                if k is None:
                    k = len(iso_keys)
                    iso_index[key] = k
                    iso_keys.append(key)
                    iso_owner.append(h.player)
                    iso_nact.append(len(acts))
                    iso_off.append(num_slots)
                    iso_action_ids.append(tuple(acts))
                    iso_level.append(depth)
                    num_slots += len(acts)
                else:
                    if iso_action_ids[k] != tuple(acts) or iso_level[k] != depth:
                        raise AssertionError(f"inconsistent infoset {key}")
                node_iso_l[nid] = k
                dec_idx = d0_idx if h.player == 0 else d1_idx
                off = iso_off[k]
                for j, a in enumerate(acts):
                    dec_idx.append(len(edge_parent) - estart)
                    edge_parent.append(nid)
                    edge_child.append(next_id)
                    edge_slot.append(off + j)
                    edge_prob.append(0.0)
                    child = h.apply(a)
                    cpath = path + (a,) if with_paths else ()
                    register(child, next_id, cpath)
                    if paths is not None:
                        paths[cpath] = next_id
                    next_level.append((next_id, child, cpath))
                    next_id += 1
                level_isos.add(k)
        if len(edge_parent) > estart:
            lv_edges.append((estart, len(edge_parent)))
            lv_seg_starts.append(np.asarray(seg_starts, dtype=np.int64))
            lv_seg_parents.append(np.asarray(seg_parents, dtype=np.int64))
            lv_dec.append((np.asarray(d0_idx, dtype=np.int64),
                           np.asarray(d1_idx, dtype=np.int64)))
            lv_chance.append(np.asarray(ch_idx, dtype=np.int64))
            lv_isos.append(np.asarray(sorted(level_isos), dtype=np.int64))
        level = next_level
        depth += 1

    iso_off_arr = np.asarray(iso_off, dtype=np.int64)
    iso_nact_arr = np.asarray(iso_nact, dtype=np.int64)
    slot_iso = np.repeat(np.arange(len(iso_keys), dtype=np.int64), iso_nact_arr)
    return FlatGame(
        game=game,
        player=np.asarray(player_l, dtype=np.int8),
        util0=np.asarray(util0_l),
        node_iso=np.asarray(node_iso_l, dtype=np.int64),
        edge_parent=np.asarray(edge_parent, dtype=np.int64),
        edge_child=np.asarray(edge_child, dtype=np.int64),
        edge_slot=np.asarray(edge_slot, dtype=np.int64),
        edge_prob=np.asarray(edge_prob),
        lv_edges=lv_edges,
        lv_seg_starts=lv_seg_starts,
        lv_seg_parents=lv_seg_parents,
        lv_dec=lv_dec,
        lv_chance=lv_chance,
        lv_isos=lv_isos,
        iso_keys=iso_keys,
        iso_index=iso_index,
        iso_owner=np.asarray(iso_owner, dtype=np.int8),
        iso_nact=iso_nact_arr,
        iso_off=iso_off_arr,
        iso_action_ids=iso_action_ids,
        slot_iso=slot_iso,
        num_slots=num_slots,
        path_index=paths,
    )


_compiled: dict[GameId, FlatGame] = {}


def compiled(game: Game, with_paths: bool = False) -> FlatGame:
    """Cached compile; recompiles once if node paths are requested later."""
    flat = _compiled.get(game.id)
    if flat is None or (with_paths and flat.path_index is None):
        flat = compile_game(game, with_paths=with_paths)
        _compiled[game.id] = flat
    return flat
