"""Policy files: tabular text tables and network checkpoints.

Tabular policies serialize one line per infoset, `owner:key<TAB>p1 p2 ...`,
sorted by key for reproducible files.  Network policies use the parameter
checkpoint format; `load_policy` detects the format and always returns a
materialized TabularPolicy.
"""

from __future__ import annotations

from pathlib import Path

from .deep import policy_from_net
from .games import Game, InfoSetId
from .nets import _CHECKPOINT_MAGIC, load_params, save_params
from .tabular import TabularPolicy


def save_tabular_policy(path, policy: TabularPolicy) -> None:
    lines = []
    for key, probs in sorted(policy.items(), key=lambda kv: (kv[0].owner, kv[0].key)):
        probs_s = " ".join(repr(float(p)) for p in probs)
        lines.append(f"{key}\t{probs_s}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_policy(game: Game, path) -> TabularPolicy:
    """Load a policy file, either tabular text or a network checkpoint."""
    path = Path(path)
    with open(path, "rb") as f:
        head = f.read(len(_CHECKPOINT_MAGIC))
    if head == _CHECKPOINT_MAGIC:
        params, meta = load_params(path)
        want = str(game.id)
        if meta.get("game") not in (None, want):
            raise ValueError(f"checkpoint is for {meta.get('game')!r}, not {want!r}")
        return policy_from_net(game, params)
    policy = TabularPolicy()
    for line in path.read_text().splitlines():
        if not line.strip():
            continue
        key_s, _, probs_s = line.partition("\t")
        probs = [float(x) for x in probs_s.split()]
        policy.set(InfoSetId.parse(key_s), probs)
    return policy


def save_network_policy(path, params, game: Game, algo: str, seed: int) -> None:
    save_params(path, params, meta={
        "game": str(game.id), "algo": algo, "seed": seed,
        "encoding_version": game.encoding_version,
    })
