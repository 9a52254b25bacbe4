"""Experiment driver: seeded multi-run execution with CSV logging.

One CSV per (algorithm, game) collects all seeds' checkpoint rows under
the fixed header.  Each running seed streams complete rows to its own
part file (so an interrupted run leaves no partial lines) and the final
CSV is merged in seed order once every run of the group finished, which
keeps reruns byte-for-byte reproducible row-wise.  The environment
variable REGRET_FORGE_OUT overrides the output root.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import ExperimentSpec, RunSpec, make_run_config
from .deep import DEEP_VARIANTS, run as run_deep
from .exploitability import exploitability
from .games import GameId, new_game
from .policyfile import save_network_policy, save_tabular_policy
from .tabular import make_rule, run_cfr

CSV_HEADER = "game,algo,seed,iteration,episodes,exploitability,wall_time_s"
OUTPUT_ENV = "REGRET_FORGE_OUT"


def output_root(explicit: str | None = None) -> Path:
    if explicit:
        return Path(explicit)
    return Path(os.environ.get(OUTPUT_ENV, "."))


def csv_name(algo: str, game: GameId) -> str:
    return f"{algo}_{str(game).replace(':', '')}.csv"


def format_row(game: GameId, algo: str, seed: int, iteration: int, episodes: int,
               exploitability_value: float, wall_time_s: float) -> str:
    return (f"{game},{algo},{seed},{iteration},{episodes},"
            f"{exploitability_value!r},{wall_time_s:.3f}")


def _default_tabular_points(iterations: int) -> tuple[int, ...]:
    points = set()
    t = 1
    while t < iterations:
        points.add(t)
        t *= 2
    points.add(iterations)
    return tuple(sorted(points))


def execute_run(spec: RunSpec, out_dir: Path) -> Path:
    """Run one seeded (game, algo) job, streaming rows to a part file."""
    out_dir.mkdir(parents=True, exist_ok=True)
    part = out_dir / f".{csv_name(spec.algo, spec.game)}.seed{spec.seed}.part"
    game = new_game(spec.game)
    with open(part, "w") as f:
        def emit(iteration, episodes, expl, wall):
            f.write(format_row(spec.game, spec.algo, spec.seed, iteration,
                               episodes, expl, wall) + "\n")
            f.flush()

        if spec.algo in DEEP_VARIANTS:
            config = make_run_config(spec.game, spec.algo, spec.overrides, spec.seed)
            result = run_deep(config, on_checkpoint=lambda row: emit(
                row.iteration, row.episodes, row.exploitability, row.wall_time_s))
            save_network_policy(out_dir / _policy_name(spec, "net"),
                                result.psi, game, spec.algo, spec.seed)
        else:
            overrides = dict(spec.overrides)
            iterations = overrides.pop("iterations", 1000)
            points = overrides.pop("eval_checkpoints", ()) or _default_tabular_points(iterations)
            rule = make_rule(spec.algo, alpha=overrides.get("alpha"),
                             beta=overrides.get("beta"), gamma=overrides.get("gamma"))
            start = time.monotonic()
            policy, _ = run_cfr(
                game, rule, iterations, eval_points=points,
                on_checkpoint=lambda it, expl: emit(
                    it, it, expl, time.monotonic() - start))
            save_tabular_policy(out_dir / _policy_name(spec, "policy"), policy)
    return part


def _policy_name(spec: RunSpec, ext: str) -> str:
    return f"{spec.algo}_{str(spec.game).replace(':', '')}_seed{spec.seed}.{ext}"


def _merge_group(out_dir: Path, algo: str, game: GameId, parts: list[Path]) -> Path:
    final = out_dir / csv_name(algo, game)
    tmp = final.with_suffix(".csv.tmp")
    with open(tmp, "w") as f:
        f.write(CSV_HEADER + "\n")
        for part in parts:
            f.write(part.read_text())
    os.replace(tmp, final)
    for part in parts:
        part.unlink()
    return final


def run_experiment(spec: ExperimentSpec, jobs: int = 1,
                   out_root: str | None = None) -> list[Path]:
    """Execute every run in the spec; returns the merged CSV paths."""
    out_dir = output_root(out_root) / spec.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    parts: dict[tuple[str, GameId], list[Path]] = {}
    ordered = sorted(spec.runs, key=lambda r: (r.algo, str(r.game), r.seed))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [(r, pool.submit(execute_run, r, out_dir)) for r in ordered]
            results = [(r, f.result()) for r, f in futures]
    else:
        results = [(r, execute_run(r, out_dir)) for r in ordered]
    for r, part in results:
        parts.setdefault((r.algo, r.game), []).append(part)
    return [_merge_group(out_dir, algo, game, group)
            for (algo, game), group in parts.items()]
