"""Replay storage for the neural solvers.

Three flavors: a per-iteration buffer that must be cleared between CFR
iterations and errors loudly on overflow, a reservoir-sampled buffer where
every inserted item has equal retention probability, and a circular buffer
that overwrites the oldest entry.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .games import InfoSetId

PER_ITERATION = "per_iteration"
RESERVOIR = "reservoir"
CIRCULAR = "circular"


@dataclass
class AdvantageSample:
    """Baseline-adjusted sampled advantages for one visited infoset."""

    infoset: InfoSetId
    features: np.ndarray
    regrets: np.ndarray  # one entry per legal action
    action_ids: tuple[int, ...]

    @property
    def action_count(self) -> int:
        return len(self.action_ids)


@dataclass
class StrategySample:
    infoset: InfoSetId
    features: np.ndarray
    iteration: int
    strategy: np.ndarray
    action_ids: tuple[int, ...]


@dataclass
class TransitionSample:
    """One sampled step (t, h, a, u, h') for history-value bootstrapping.

    `next_*` fields are None when the reached node is terminal; `utility`
    is player 0's normalized utility there and 0 otherwise.
    """

    iteration: int
    h_features: np.ndarray
    action_id: int
    utility: float
    next_h_features: np.ndarray | None
    next_infoset: InfoSetId | None
    next_features: np.ndarray | None
    next_action_ids: tuple[int, ...] | None
    next_player: int | None

    @property
    def terminal(self) -> bool:
        return self.next_infoset is None


@dataclass
class Buffer:
    """Fixed-capacity sample store; `kind` selects the eviction policy."""

    kind: str
    capacity: int
    rng: np.random.Generator | None = None
    seen_count: int = 0
    _items: list[Any] = field(default_factory=list)
    _head: int = 0

    def __post_init__(self):
        if self.kind not in (PER_ITERATION, RESERVOIR, CIRCULAR):
            raise ValueError(f"unknown buffer kind {self.kind!r}")
        if self.capacity < 1:
            raise ValueError("capacity must be positive")
        if self.kind == RESERVOIR and self.rng is None:
            raise ValueError("reservoir buffers need an rng")

    def __len__(self) -> int:
        return len(self._items)

    def insert(self, item) -> None:
        self.seen_count += 1
        if self.kind == PER_ITERATION:
            if len(self._items) >= self.capacity:
                raise OverflowError(
                    f"per-iteration buffer exceeded capacity {self.capacity}")
            self._items.append(item)
        elif self.kind == RESERVOIR:
            if len(self._items) < self.capacity:
                self._items.append(item)
            else:
                j = int(self.rng.integers(0, self.seen_count))
                if j < self.capacity:
                    self._items[j] = item
        else:  # circular
            if len(self._items) < self.capacity:
                self._items.append(item)
            else:
                self._items[self._head] = item
                self._head = (self._head + 1) % self.capacity

    def clear(self) -> None:
        self._items.clear()
        self._head = 0
        self.seen_count = 0

    def items(self) -> list:
        """Current contents; circular buffers return oldest-first order."""
        if self.kind == CIRCULAR and self._head:
            return self._items[self._head:] + self._items[:self._head]
        return list(self._items)

    def sample_batch(self, n: int, rng: np.random.Generator) -> list:
        """n items drawn uniformly with replacement."""
        if not self._items:
            raise ValueError("cannot sample from an empty buffer")
        idx = rng.integers(0, len(self._items), size=n)
        items = self._items
        return [items[i] for i in idx]


def insert(buf: Buffer, item) -> None:
    buf.insert(item)


def sample_batch(buf: Buffer, n: int, rng: np.random.Generator) -> list:
    return buf.sample_batch(n, rng)
