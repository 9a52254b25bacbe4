"""Command-line driver for solving, evaluating and match play.

Subcommands: stats, tabular, deep, eval, h2h, run.  Output locations
default to the current directory; REGRET_FORGE_OUT overrides the root.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from .agents import STYLES, head2head, rule_policy, tabular_policy_fn
from .config import ConfigError, RunSpec, parse_config, parse_experiment
from .deep import DEEP_VARIANTS
from .exploitability import exploitability
from .games import enumerate_stats, new_game, parse_game_id
from .harness import CSV_HEADER, csv_name, execute_run, output_root, run_experiment
from .policyfile import load_policy
from .tabular import _ALIASES as TABULAR_ALIASES


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="regret-forge",
        description="CFR solvers and evaluators for two-player zero-sum games")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="exact game-size statistics")
    p.add_argument("--game", required=True)

    p = sub.add_parser("tabular", help="run a tabular CFR variant")
    p.add_argument("--game", required=True)
    p.add_argument("--algo", required=True,
                   help="cfr | cfr+ | linear | dcfr | dcfr+ | pcfr+ | pdcfr+")
    p.add_argument("--iters", type=int, required=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--out", default=None)

    p = sub.add_parser("deep", help="run a neural CFR variant")
    p.add_argument("--game", required=True)
    p.add_argument("--algo", required=True, choices=sorted(DEEP_VARIANTS))
    p.add_argument("--config", default=None, help="YAML hyperparameter overrides")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("eval", help="exact exploitability of a policy file")
    p.add_argument("--game", required=True)
    p.add_argument("--policy", required=True)

    p = sub.add_parser("h2h", help="head-to-head match between two policies")
    p.add_argument("--game", default="leduc")
    p.add_argument("--a", required=True, help="policy:FILE | rule:STYLE | uniform")
    p.add_argument("--b", required=True)
    p.add_argument("--n", type=int, default=20_000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("run", help="execute an experiment spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None)
    return parser


def _uniform_policy(game, h):
    n = len(h.legal_actions())
    return np.full(n, 1.0 / n)


def _policy_fn(game, text: str):
    if text == "uniform":
        return _uniform_policy
    kind, _, arg = text.partition(":")
    if kind == "rule":
        style = STYLES.get(arg)
        if style is None:
            raise ConfigError(f"unknown rule style {arg!r}; choose from {sorted(STYLES)}")
        return rule_policy(style)
    if kind == "policy":
        return tabular_policy_fn(load_policy(game, arg))
    raise ConfigError(f"bad policy spec {text!r}; use policy:FILE, rule:STYLE or uniform")


def _single_run(spec: RunSpec, out: str | None) -> int:
    """Execute one run and fold its part file into the group CSV."""
    out_dir = output_root(out)
    part = execute_run(spec, out_dir)
    final = out_dir / csv_name(spec.algo, spec.game)
    body = part.read_text()
    if final.exists():
        final.write_text(final.read_text() + body)
    else:
        final.write_text(CSV_HEADER + "\n" + body)
    part.unlink()
    print(f"wrote {final}")
    return 0


def _dispatch(args) -> int:
    if args.command == "stats":
        game = new_game(args.game)
        t0 = time.monotonic()
        s = enumerate_stats(game)
        print(f"game={game.id} histories={s.num_histories} infosets={s.num_infosets} "
              f"terminals={s.num_terminals} depth={s.depth} "
              f"max_infoset_size={s.max_infoset_size} ({time.monotonic() - t0:.1f}s)")
        return 0

    if args.command == "tabular":
        if args.algo not in TABULAR_ALIASES:
            raise ConfigError(f"unknown tabular algo {args.algo!r}")
        overrides = {"iterations": args.iters}
        for key in ("alpha", "beta", "gamma"):
            value = getattr(args, key)
            if value is not None:
                overrides[key] = value
        spec = RunSpec(game=parse_game_id(args.game), algo=TABULAR_ALIASES[args.algo],
                       overrides=overrides, seed=0)
        return _single_run(spec, args.out)

    if args.command == "deep":
        overrides = parse_config(args.config, args.algo) if args.config else {}
        spec = RunSpec(game=parse_game_id(args.game), algo=args.algo,
                       overrides=overrides, seed=args.seed)
        return _single_run(spec, args.out)

    if args.command == "eval":
        game = new_game(args.game)
        policy = load_policy(game, args.policy)
        print(f"exploitability={exploitability(game, policy)!r}")
        return 0

    if args.command == "h2h":
        game = new_game(args.game)
        result = head2head(_policy_fn(game, args.a), _policy_fn(game, args.b),
                           game, args.n, args.seed)
        print(f"{args.a},{args.b},{result.mean!r},{result.half_width!r},{result.matches}")
        return 0

    if args.command == "run":
        spec = parse_experiment(args.spec)
        for path in run_experiment(spec, jobs=args.jobs, out_root=args.out):
            print(f"wrote {path}")
        return 0

    raise AssertionError(args.command)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
