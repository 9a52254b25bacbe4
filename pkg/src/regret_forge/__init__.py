"""Solvers and evaluators for two-player zero-sum imperfect-information games.

Tabular CFR variants (cfr, cfr+, linear, dcfr, dcfr+, pcfr+, pdcfr+) with
exact exploitability, plus model-free neural solvers built on
outcome-sampling traversal with learned-baseline variance reduction.
"""

from .deep import DEEP_VARIANTS, DeepVariant, RunConfig, deep_variant
from .deep import run as run_deep
from .exploitability import best_response_value, exploitability, extract_policy
from .games import GameId, GameStats, InfoSetId, enumerate_stats, new_game
from .tabular import (
    RegretUpdateRule,
    TabularPolicy,
    average_strategy,
    make_rule,
    regret_matching,
    regret_matching_argmax,
    run_cfr,
)

__version__ = "0.1.0"

__all__ = [
    "DEEP_VARIANTS",
    "DeepVariant",
    "GameId",
    "GameStats",
    "InfoSetId",
    "RegretUpdateRule",
    "RunConfig",
    "TabularPolicy",
    "average_strategy",
    "best_response_value",
    "deep_variant",
    "enumerate_stats",
    "exploitability",
    "extract_policy",
    "make_rule",
    "new_game",
    "regret_matching",
    "regret_matching_argmax",
    "run_cfr",
    "run_deep",
]
