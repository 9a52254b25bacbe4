"""Run configuration: YAML key-value files with per-algorithm defaults.

A run config file is a flat mapping of hyperparameter overrides; unset
keys fall back to the algorithm's defaults (paper-scale for the neural
solvers).  Unknown keys and out-of-range values are rejected.  Experiment
spec files add a `runs` list plus an output directory.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import yaml

from .deep import DEEP_VARIANTS, RunConfig, deep_variant
from .games import GameId, parse_game_id
from .tabular import _ALIASES as _TABULAR_ALIASES

TABULAR_ALGOS = tuple(sorted(set(_TABULAR_ALIASES)))

# name -> (default, min, max); None bounds are unchecked
_NEURAL_KEYS = {
    "iterations": (500, 1, None),
    "num_traversals": (10_000, 1, None),
    "epsilon": (0.6, 0.0, 1.0),
    "learning_rate": (0.001, 1e-12, 1.0),
    "advantage_buffer_size": (1_000_000, 1, None),
    "ave_policy_buffer_size": (1_000_000, 1, None),
    "history_value_buffer_size": (1_000_000, 1, None),
    "advantage_network_train_steps": (750, 1, None),
    "advantage_network_batch_size": (2048, 1, None),
    "ave_policy_network_train_steps": (5000, 1, None),
    "ave_policy_batch_size": (2048, 1, None),
    "history_value_network_train_steps": (10_000, 1, None),
    "history_value_batch_size": (2048, 1, None),
    "num_layers": (3, 1, None),
    "num_hiddens": (64, 1, None),
    "alpha": (None, None, None),  # default depends on the variant
    "gamma": (None, None, None),
    "eval_checkpoints": ((), None, None),
}

_TABULAR_KEYS = {
    "iterations": (1000, 1, None),
    "alpha": (None, None, None),
    "beta": (None, None, None),
    "gamma": (None, None, None),
    "eval_checkpoints": ((), None, None),
}


class ConfigError(ValueError):
    pass


def _check_range(key: str, value, lo, hi):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    if lo is not None and value < lo:
        raise ConfigError(f"{key}={value} below minimum {lo}")
    if hi is not None and value > hi:
        raise ConfigError(f"{key}={value} above maximum {hi}")


def parse_config(path, algo: str | None = None) -> dict:
    """Load and validate a flat override mapping from a YAML file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    raw = yaml.safe_load(path.read_text())
    if raw is None:
        raw = {}  # an empty file means all defaults
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a key-value mapping")
    return validate_overrides(raw, algo)


def validate_overrides(overrides: dict, algo: str | None = None) -> dict:
    known = _NEURAL_KEYS if (algo is None or algo in DEEP_VARIANTS) else _TABULAR_KEYS
    if algo is not None and algo not in DEEP_VARIANTS and algo not in TABULAR_ALGOS:
        raise ConfigError(f"unknown algorithm {algo!r}")
    out = {}
    for key, value in overrides.items():
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        _, lo, hi = known[key]
        if key == "eval_checkpoints":
            value = tuple(int(v) for v in value)
        else:
            _check_range(key, value, lo, hi)
        out[key] = value
    return out


def resolved(overrides: dict, key: str):
    value = overrides.get(key)
    if value is None:
        value = _NEURAL_KEYS[key][0]
    return value


def make_run_config(game: GameId | str, algo: str, overrides: dict, seed: int) -> RunConfig:
    """Resolve a validated override mapping into a full neural RunConfig."""
    if isinstance(game, str):
        game = parse_game_id(game)
    variant = deep_variant(algo, alpha=overrides.get("alpha"), gamma=overrides.get("gamma"))
    return RunConfig(
        game=game,
        variant=variant,
        iterations=resolved(overrides, "iterations"),
        traversals=resolved(overrides, "num_traversals"),
        epsilon=resolved(overrides, "epsilon"),
        learning_rate=resolved(overrides, "learning_rate"),
        advantage_buffer_size=resolved(overrides, "advantage_buffer_size"),
        strategy_buffer_size=resolved(overrides, "ave_policy_buffer_size"),
        history_value_buffer_size=resolved(overrides, "history_value_buffer_size"),
        advantage_train_steps=resolved(overrides, "advantage_network_train_steps"),
        advantage_batch_size=resolved(overrides, "advantage_network_batch_size"),
        strategy_train_steps=resolved(overrides, "ave_policy_network_train_steps"),
        strategy_batch_size=resolved(overrides, "ave_policy_batch_size"),
        value_train_steps=resolved(overrides, "history_value_network_train_steps"),
        value_batch_size=resolved(overrides, "history_value_batch_size"),
        num_layers=resolved(overrides, "num_layers"),
        num_hiddens=resolved(overrides, "num_hiddens"),
        seed=seed,
        eval_checkpoints=tuple(overrides.get("eval_checkpoints", ())),
    )


@dataclass(frozen=True)
class RunSpec:
    game: GameId
    algo: str
    overrides: dict
    seed: int


@dataclass(frozen=True)
class ExperimentSpec:
    runs: tuple[RunSpec, ...]
    output_dir: str


def parse_experiment(path) -> ExperimentSpec:
    """Parse an experiment spec: output_dir plus a list of seeded runs."""
    raw = yaml.safe_load(Path(path).read_text())
    if not isinstance(raw, dict) or "runs" not in raw:
        raise ConfigError(f"experiment spec {path} needs a 'runs' list")
    unknown = set(raw) - {"runs", "output_dir"}
    if unknown:
        raise ConfigError(f"unknown experiment keys {sorted(unknown)}")
    runs: list[RunSpec] = []
    for i, entry in enumerate(raw["runs"]):
        if not isinstance(entry, dict):
            raise ConfigError(f"run entry {i} must be a mapping")
        entry = dict(entry)
        game = parse_game_id(str(entry.pop("game")))
        algo = str(entry.pop("algo"))
        seeds = entry.pop("seeds", [0])
        if isinstance(seeds, int):
            seeds = [seeds]
        if len(set(seeds)) != len(seeds):
            raise ConfigError(f"run entry {i} repeats a seed")
        overrides = validate_overrides(entry, algo)
        for seed in seeds:
            runs.append(RunSpec(game=game, algo=algo, overrides=overrides, seed=int(seed)))
    return ExperimentSpec(runs=tuple(runs), output_dir=str(raw.get("output_dir", "results")))
