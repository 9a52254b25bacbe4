"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The neural desk-scale and ablation runs are executed once per session in a
two-process pool; run with `pytest tests/test_acceptance.py -s` to watch
the per-criterion lines stream.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from multiprocessing import get_context

import numpy as np
import pytest

from regret_forge.agents import STYLES, head2head, rule_policy, tabular_policy_fn
from regret_forge.config import parse_experiment
from regret_forge.deep import RunConfig, deep_variant, run as run_deep
from regret_forge.exploitability import exploitability
from regret_forge.games import GameStats, enumerate_stats, new_game, parse_game_id
from regret_forge.harness import run_experiment
from regret_forge.nets import (
    init_mlp,
    make_target_bootstrap_cumulative,
    make_target_q,
    mse_gradients,
    strategy_loss_weight,
)
from regret_forge.tabular import (
    make_rule,
    predicted_cumulative_regret,
    regret_matching,
    regret_matching_argmax,
    run_cfr,
    update_cumulative_regret,
    update_cumulative_strategy,
)
from regret_forge.traversal import (
    MixedSamplingPolicy,
    baseline_adjusted_values,
    build_sampling_policy,
    episode_path,
    estimator_check,
    estimator_hat,
    sample_index,
)

from conftest import (
    expected_value,
    infoset_tables,
    path_reach,
    random_policy,
    terminal_paths,
)

EPSILON = 0.6


def _report(criterion: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    print(f"[acceptance] {status} {criterion}" + (f" :: {detail}" if detail else ""),
          flush=True)


# ----------------------------------------------------------------------
# 1. Game-size reproduction
# ----------------------------------------------------------------------

TABLE_SIZES = {
    "kuhn": (58, 12, 30, 6, 2),
    "leduc": (9457, 936, 5520, 12, 5),
    "liars_dice:5": (51181, 5120, 25575, 14, 5),
    "liars_dice:6": (294883, 24576, 147420, 16, 6),
    "goofspiel_imp:5": (26931, 2124, 14400, 9, 46),
    "goofspiel_imp:6": (969523, 34482, 518400, 11, 230),
    "battleship:2": (10069, 3286, 5568, 9, 4),
    "battleship:3": (732607, 81027, 552132, 9, 7),
}


def test_game_sizes_match_published_table():
    start = time.monotonic()
    mismatches = []
    for name, expected in TABLE_SIZES.items():
        got = tuple(enumerate_stats(new_game(name)))
        if got != expected:
            mismatches.append((name, got, expected))
    elapsed = time.monotonic() - start
    ok = not mismatches and elapsed < 120.0
    _report("game sizes (8 games, 5 columns, exact)", ok,
            f"{elapsed:.1f}s" + (f" mismatches={mismatches}" if mismatches else ""))
    assert not mismatches
    assert elapsed < 120.0


# ----------------------------------------------------------------------
# 2. Theorem oracles and baseline unbiasedness (exact, 1e-10)
# ----------------------------------------------------------------------

def _episode_advantage_rows(game, sigma, xi, path, q_lookup, traverser):
    """Baseline-adjusted advantage rows emitted along one episode."""
    episode = episode_path(game, path)
    decisions = [j for j, h in enumerate(episode[:-1])
                 if not h.terminal and h.player >= 0]
    child_val = game.normalize(episode[-1].utility(traverser))
    rows = {}
    for j in reversed(decisions):
        h = episode[j]
        acts = h.legal_actions()
        a_idx = acts.index(path[j])
        key = h.infoset_key()
        sig = sigma.prob(key, len(acts))
        xi_row = xi.prob(key, len(acts))
        q_row = q_lookup(path[:j], acts)
        if traverser == 1:
            q_row = -q_row
        v_row = baseline_adjusted_values(q_row, a_idx, child_val, float(xi_row[a_idx]))
        node = float(sig @ v_row)
        if h.player == traverser:
            rows[key] = v_row - node
        child_val = node
    return rows


def _conditional_expectation(game, sigma, xi, traverser, estimator):
    """E[row | episode visits I] for every traverser infoset, by enumeration."""
    paths = terminal_paths(game)
    weights = [path_reach(game, p, xi) for p in paths]
    nums: dict = {}
    denoms: dict = {}
    for path, w in zip(paths, weights):
        for key, row in estimator(path).items():
            nums[key] = nums.get(key, 0.0) + w * np.asarray(row)
            denoms[key] = denoms.get(key, 0.0) + w
    return {key: nums[key] / denoms[key] for key in nums}


def test_theorem_oracles_and_baseline_unbiasedness(kuhn):
    tol = 1e-10
    worst_hat = worst_chk = worst_bar = 0.0
    rng = np.random.default_rng(2024)
    for profile in range(5):
        sigma = random_policy(kuhn, rng)
        for traverser in (0, 1):
            xi = MixedSamplingPolicy(sigma, EPSILON, traverser)
            tables = infoset_tables(kuhn, sigma, traverser)
            xi_tables = infoset_tables(kuhn, xi, traverser)
            paths = terminal_paths(kuhn)
            weights = [path_reach(kuhn, p, xi) for p in paths]

            for key, (v_row, reach_opp, _) in tables.items():
                n = len(v_row)
                sig_row = sigma.prob(key, n)
                num_hat = np.zeros(n)
                num_chk = np.zeros(n)
                denom = 0.0
                for path, w in zip(paths, weights):
                    episode = episode_path(kuhn, path)
                    if not any((not h.terminal) and h.player == key.owner
                               and h.infoset_key() == key for h in episode[:-1]):
                        continue
                    denom += w
                    for a in range(n):
                        num_hat[a] += w * estimator_hat(kuhn, sigma, xi, episode, key, a)
                        num_chk[a] += w * estimator_check(kuhn, sigma, xi, episode, key, a)
                e_hat = num_hat / denom
                e_chk = num_chk / denom
                r_exact = v_row - float(sig_row @ v_row)
                advantage = r_exact / reach_opp
                r_hat = e_hat - float(sig_row @ e_hat)
                r_chk = e_chk - float(sig_row @ e_chk)
                worst_hat = max(worst_hat, float(
                    np.abs(r_hat - r_exact / xi_tables[key][2]).max()))
                worst_chk = max(worst_chk, float(np.abs(r_chk - advantage).max()))

    # Baseline-adjusted estimator with three arbitrary fixed Q tables.
    sigma = random_policy(kuhn, np.random.default_rng(77))
    for q_seed in range(3):
        q_rng = np.random.default_rng(1000 + q_seed)
        q_tables: dict = {}

        def q_lookup(prefix, acts, _rng=q_rng, _tab=q_tables):
            if prefix not in _tab:
                _tab[prefix] = _rng.normal(scale=0.8, size=len(acts))
            return _tab[prefix]

        for traverser in (0, 1):
            xi = MixedSamplingPolicy(sigma, EPSILON, traverser)
            tables = infoset_tables(kuhn, sigma, traverser)
            expectations = _conditional_expectation(
                kuhn, sigma, xi, traverser,
                lambda path: _episode_advantage_rows(kuhn, sigma, xi, path,
                                                     q_lookup, traverser))
            for key, (v_row, reach_opp, _) in tables.items():
                sig_row = sigma.prob(key, len(v_row))
                advantage = (v_row - float(sig_row @ v_row)) / reach_opp
                worst_bar = max(worst_bar, float(
                    np.abs(expectations[key] - advantage).max()))

    ok = worst_hat < tol and worst_chk < tol and worst_bar < tol
    _report("theorem oracles + baseline unbiasedness (1e-10)", ok,
            f"hat={worst_hat:.2e} check={worst_chk:.2e} baseline={worst_bar:.2e}")
    assert worst_hat < tol
    assert worst_chk < tol
    assert worst_bar < tol


# ----------------------------------------------------------------------
# 3. Variance reduction with the exact-expectation baseline
# ----------------------------------------------------------------------

def test_variance_reduction_beats_plain_estimator(kuhn):
    start = time.monotonic()
    rng = np.random.default_rng(5)
    sigma = random_policy(kuhn, rng)
    traverser = 0
    xi = MixedSamplingPolicy(sigma, EPSILON, traverser)

    # Exact history action values for player 0 under sigma (oracle recursion).
    exact_q: dict = {}

    def build(h, prefix):
        if h.terminal:
            return
        if h.player >= 0:
            acts = h.legal_actions()
            exact_q[prefix] = np.array([
                expected_value(kuhn, h.apply(a), sigma, 0) for a in acts])
            for a in acts:
                build(h.apply(a), prefix + (a,))
        else:
            for a, _ in h.chance_outcomes():
                build(h.apply(a), prefix + (a,))

    build(kuhn.root(), ())

    def q_exact(prefix, acts):
        return exact_q[prefix]

    def q_zero(prefix, acts):
        return np.zeros(len(acts))

    episodes = 100_000
    sums: dict = {}
    n_visits: dict = {}
    for _ in range(episodes):
        # sample one terminal path under xi
        h = kuhn.root()
        path = []
        while not h.terminal:
            if h.player < 0:
                outs = h.chance_outcomes()
                a = outs[sample_index([p for _, p in outs], rng)][0]
            else:
                acts = h.legal_actions()
                sig = sigma.prob(h.infoset_key(), len(acts))
                probs = build_sampling_policy(sig, EPSILON, h.player == traverser)
                a = acts[sample_index(probs, rng)]
            path.append(a)
            h = h.apply(a)
        path = tuple(path)
        bar = _episode_advantage_rows(kuhn, sigma, xi, path, q_exact, traverser)
        chk = _episode_advantage_rows(kuhn, sigma, xi, path, q_zero, traverser)
        for key, row in bar.items():
            s = sums.setdefault(key, [0.0, 0.0, 0.0, 0.0])  # sum/sumsq per kind
            s[0] = s[0] + row
            s[1] = s[1] + row * row
            s[2] = s[2] + chk[key]
            s[3] = s[3] + chk[key] * chk[key]
            n_visits[key] = n_visits.get(key, 0) + 1

    checked = 0
    violations = []
    for key, count in n_visits.items():
        if count < 1000:
            continue
        checked += 1
        s = sums[key]
        var_bar = s[1] / count - (s[0] / count) ** 2
        var_chk = s[3] / count - (s[2] / count) ** 2
        if not np.all(var_bar < var_chk):
            violations.append((str(key), var_bar, var_chk))
    elapsed = time.monotonic() - start
    ok = checked >= 4 and not violations and elapsed < 60.0
    _report("variance reduction (Var[baseline] < Var[plain])", ok,
            f"infosets={checked} elapsed={elapsed:.0f}s")
    assert checked >= 4
    assert not violations, violations
    assert elapsed < 60.0


# ----------------------------------------------------------------------
# 4. Tabular convergence
# ----------------------------------------------------------------------

TABULAR_TARGETS = [
    # (variant, kwargs, kuhn bound, leduc bound)
    ("cfr+", {}, 1e-3, 1e-2),
    ("dcfr", {"alpha": 1.5, "beta": 0.0, "gamma": 2.0}, 1e-3, 1e-2),
    ("dcfr+", {"alpha": 2.0, "gamma": 2.0}, 1e-3, 1e-2),
    ("pcfr+", {}, 1e-3, 1e-2),
    ("pdcfr+", {"alpha": 2.3, "gamma": 2.0}, 1e-3, 1e-2),
]


def test_tabular_convergence(kuhn, leduc):
    results = []
    ok = True
    for variant, kwargs, kuhn_bound, leduc_bound in TABULAR_TARGETS:
        rule = make_rule(variant, **kwargs)
        _, log_k = run_cfr(kuhn, rule, 2000)
        _, log_l = run_cfr(leduc, rule, 2000)
        e_k, e_l = log_k[-1][1], log_l[-1][1]
        results.append(f"{variant}: kuhn={e_k:.1e} leduc={e_l:.1e}")
        ok = ok and e_k < kuhn_bound and e_l < leduc_bound
        assert e_k < kuhn_bound, (variant, e_k)
        assert e_l < leduc_bound, (variant, e_l)
    _, log_vanilla = run_cfr(kuhn, make_rule("cfr"), 10_000)
    e_v = log_vanilla[-1][1]
    ok = ok and e_v < 1e-2
    _report("tabular convergence (within 10k iterations)", ok,
            "; ".join(results) + f"; cfr kuhn={e_v:.1e}")
    assert e_v < 1e-2


# ----------------------------------------------------------------------
# 5. Regret-update unit identities (exact)
# ----------------------------------------------------------------------

def test_update_rule_worked_examples_exact():
    checks = [
        update_cumulative_regret(make_rule("dcfr+", alpha=2.0), 4.0, -1.0, 2) == 1.0,
        update_cumulative_regret(make_rule("cfr+"), 0.5, -2.0, 1) == 0.0,
        update_cumulative_regret(make_rule("linear"), 1.0, 2.0, 3) == 7.0,
        predicted_cumulative_regret(make_rule("pdcfr+", alpha=1.0), 2.0, -0.5, 1) == 0.5,
        predicted_cumulative_regret(make_rule("pcfr+"), 1.0, -3.0, 2) == 0.0,
        update_cumulative_strategy(make_rule("dcfr", gamma=2.0), 4.0, 1.0, 2) == 2.0,
        update_cumulative_strategy(make_rule("cfr"), 0.0, 0.3, 1) == 0.3,
        update_cumulative_strategy(make_rule("cfr+"), 1.0, 0.5, 4) == 3.0,
        np.array_equal(regret_matching([2.0, 1.0, 1.0]), [0.5, 0.25, 0.25]),
        np.array_equal(regret_matching([-1.0, 0.0, -3.0]), [1 / 3] * 3),
        np.array_equal(regret_matching([3.0, -1.0]), [1.0, 0.0]),
        np.array_equal(regret_matching_argmax([-1.0, -0.5, -3.0]), [0.0, 1.0, 0.0]),
        np.array_equal(regret_matching_argmax([2.0, 2.0]), [0.5, 0.5]),
        np.array_equal(regret_matching_argmax([-1.0, -1.0]), [1.0, 0.0]),
        np.array_equal(
            make_target_bootstrap_cumulative([4.0, -2.0], [-1.0, 1.0], 2, 2.0, True, True),
            [1.0, 1.0]),
        np.array_equal(
            make_target_bootstrap_cumulative([1.0, 1.0], [0.5, -0.5], 5, 0.0, False, False),
            [1.5, 0.5]),
        np.array_equal(
            make_target_bootstrap_cumulative([2.0, 0.0], [0.0, 1.0], 2, 1.0, True, False),
            [1.0, 1.0]),
        make_target_q(0.5, 99.0, True) == 0.5,
        make_target_q(0.0, -0.2, False) == -0.2,
        strategy_loss_weight(10, 10, 2.0) == 1.0,
        strategy_loss_weight(5, 10, 2.0) == 0.25,
        strategy_loss_weight(7, 10, 0.0) == 1.0,
    ]
    ok = all(bool(c) for c in checks)
    _report("regret-update unit identities (exact)", ok,
            f"{sum(bool(c) for c in checks)}/{len(checks)}")
    assert ok


# ----------------------------------------------------------------------
# 6. Gradient correctness for every loss shape
# ----------------------------------------------------------------------

def test_gradient_correctness_all_losses():
    from test_nets import _loss_setup  # reuse the per-loss batch builders

    kinds = ("bootstrap_cumulative", "instantaneous", "q_td", "weighted_strategy")
    worst = 0.0
    for kind in kinds:
        for seed in range(10):
            rng = np.random.default_rng(seed)
            params = init_mlp((5, 8, 6, 4), rng)
            params.weights[-1] = rng.normal(size=params.weights[-1].shape) * 0.4
            X, Y, mask, weights = _loss_setup(kind, rng)
            grads, _ = mse_gradients(params, X, Y, mask, weights)
            eps = 1e-5
            for layer in range(len(params.weights)):
                w = params.weights[layer]
                idx = (w.shape[0] // 2, w.shape[1] // 2)
                orig = w[idx]
                w[idx] = orig + eps
                _, lp = mse_gradients(params, X, Y, mask, weights)
                w[idx] = orig - eps
                _, lm = mse_gradients(params, X, Y, mask, weights)
                w[idx] = orig
                fd = (lp - lm) / (2 * eps)
                an = grads[0][layer][idx]
                rel = abs(fd - an) / max(abs(fd), abs(an), 1e-8)
                worst = max(worst, rel)
    ok = worst < 1e-4
    _report("gradient correctness (4 losses x 10 nets)", ok, f"worst rel={worst:.2e}")
    assert worst < 1e-4


# ----------------------------------------------------------------------
# 7/8. Desk-scale neural convergence and ablation ordering
# ----------------------------------------------------------------------

_DESK_NET = dict(
    advantage_buffer_size=1_000_000, strategy_buffer_size=250_000,
    history_value_buffer_size=300_000,
    advantage_train_steps=96, advantage_batch_size=256,
    strategy_train_steps=384, strategy_batch_size=256,
    value_train_steps=160, value_batch_size=256,
)


def _desk_config(game, variant, iterations, traversals, seed,
                 checkpoints) -> RunConfig:
    return RunConfig(
        game=parse_game_id(game), variant=deep_variant(variant),
        iterations=iterations, traversals=traversals, seed=seed,
        eval_checkpoints=checkpoints, **_DESK_NET)


def _run_deep_job(cfg: RunConfig):
    result = run_deep(cfg)
    return [(r.iteration, r.exploitability) for r in result.log]


def _pool_map(configs):
    ctx = get_context("fork")
    with ProcessPoolExecutor(max_workers=2, mp_context=ctx) as pool:
        return list(pool.map(_run_deep_job, configs))


@pytest.fixture(scope="module")
def desk_runs():
    jobs = []
    for variant in ("vr_deep_pdcfr_plus", "vr_deep_dcfr_plus"):
        for seed in (0, 1):
            jobs.append(("kuhn", variant, seed,
                         _desk_config("kuhn", variant, 100, 1000, seed, (1, 100))))
            jobs.append(("leduc", variant, seed,
                         _desk_config("leduc", variant, 200, 2000, seed, (1, 200))))
    logs = _pool_map([j[3] for j in jobs])
    return {(g, v, s): dict(log) for (g, v, s, _), log in zip(jobs, logs)}


def test_desk_scale_neural_convergence(desk_runs):
    details = []
    ok = True
    for variant in ("vr_deep_pdcfr_plus", "vr_deep_dcfr_plus"):
        kuhn_final = np.median([desk_runs[("kuhn", variant, s)][100] for s in (0, 1)])
        leduc_final = np.median([desk_runs[("leduc", variant, s)][200] for s in (0, 1)])
        leduc_first = np.median([desk_runs[("leduc", variant, s)][1] for s in (0, 1)])
        improvement = leduc_first / leduc_final
        details.append(f"{variant}: kuhn={kuhn_final:.3f} leduc={leduc_final:.3f} "
                       f"improvement={improvement:.1f}x")
        ok = ok and kuhn_final < 0.1 and leduc_final < 0.35 and improvement >= 3.0
    _report("desk-scale neural convergence (median of 2 seeds)", ok, "; ".join(details))
    for variant in ("vr_deep_pdcfr_plus", "vr_deep_dcfr_plus"):
        assert np.median([desk_runs[("kuhn", variant, s)][100] for s in (0, 1)]) < 0.1
        leduc_final = np.median([desk_runs[("leduc", variant, s)][200] for s in (0, 1)])
        leduc_first = np.median([desk_runs[("leduc", variant, s)][1] for s in (0, 1)])
        assert leduc_final < 0.35
        assert leduc_first / leduc_final >= 3.0


ABLATION_VARIANTS = ("vr_deep_pdcfr_plus", "vr_deep_cfr", "deep_pdcfr_plus_no_baseline")


@pytest.fixture(scope="module")
def ablation_runs():
    jobs = []
    for variant in ABLATION_VARIANTS:
        for seed in (0, 1, 2, 3):
            jobs.append((variant, seed,
                         _desk_config("leduc", variant, 80, 1000, seed, (80,))))
    logs = _pool_map([j[2] for j in jobs])
    return {(v, s): log[-1][1] for (v, s, _), log in zip(jobs, logs)}


def test_ablation_ordering(ablation_runs):
    medians = {v: float(np.median([ablation_runs[(v, s)] for s in (0, 1, 2, 3)]))
               for v in ABLATION_VARIANTS}
    base = medians["vr_deep_pdcfr_plus"]
    detail = " ".join(f"{v}={m:.3f}" for v, m in medians.items())
    soft_failures = []
    hard = True
    for other in ("vr_deep_cfr", "deep_pdcfr_plus_no_baseline"):
        if base <= medians[other]:
            continue
        gap = (base - medians[other]) / medians[other]
        if gap <= 0.10:
            seeds = {s: (ablation_runs[("vr_deep_pdcfr_plus", s)],
                         ablation_runs[(other, s)]) for s in (0, 1, 2, 3)}
            soft_failures.append(f"{other}: median gap {gap:.1%}, per-seed {seeds}")
        else:
            hard = False
    _report("ablation ordering (median of 4 seeds, soft within 10%)", hard,
            detail + ("; SOFT: " + "; ".join(soft_failures) if soft_failures else ""))
    for line in soft_failures:
        print(f"[acceptance] ablation soft report :: {line}", flush=True)
    assert hard, f"ordering violated beyond 10%: {detail}"


# ----------------------------------------------------------------------
# 9. Head-to-head sanity
# ----------------------------------------------------------------------

def test_head_to_head_sanity(leduc, leduc_cfrplus_policy):
    solver = tabular_policy_fn(leduc_cfrplus_policy)
    details = []
    ok = True
    for name, style in sorted(STYLES.items()):
        result = head2head(solver, rule_policy(style), leduc, 100_000, seed=11)
        margin = result.mean - 3 * result.half_width
        details.append(f"{name}: {result.mean:.4f}±{result.half_width:.4f}")
        ok = ok and margin > 0.0
        assert margin > 0.0, (name, result)
    self_play = head2head(solver, solver, leduc, 100_000, seed=12)
    ok = ok and abs(self_play.mean) <= 3 * self_play.half_width
    _report("head-to-head sanity (n=100k)", ok,
            "; ".join(details) + f"; self={self_play.mean:.5f}±{self_play.half_width:.5f}")
    assert abs(self_play.mean) <= 3 * self_play.half_width


# ----------------------------------------------------------------------
# 10. Determinism: byte-identical rerun
# ----------------------------------------------------------------------

def _mask_wall_time(text: str) -> str:
    lines = text.splitlines()
    return "\n".join(",".join(line.split(",")[:6] + ["WALL"]) for line in lines)


def test_rerun_is_byte_identical(tmp_path):
    spec_file = tmp_path / "exp.yaml"
    spec_file.write_text(
        "output_dir: runs\n"
        "runs:\n"
        "  - game: kuhn\n"
        "    algo: vr_deep_pdcfr_plus\n"
        "    iterations: 3\n"
        "    num_traversals: 80\n"
        "    advantage_network_train_steps: 16\n"
        "    advantage_network_batch_size: 32\n"
        "    ave_policy_network_train_steps: 32\n"
        "    ave_policy_batch_size: 32\n"
        "    history_value_network_train_steps: 16\n"
        "    history_value_batch_size: 32\n"
        "    seeds: [0, 1]\n"
        "  - game: kuhn\n"
        "    algo: cfr_plus\n"
        "    iterations: 50\n"
        "    seeds: [0]\n")
    spec = parse_experiment(spec_file)
    first = sorted(run_experiment(spec, out_root=str(tmp_path / "a")))
    second = sorted(run_experiment(spec, out_root=str(tmp_path / "b")))
    identical = True
    for f1, f2 in zip(first, second):
        t1, t2 = f1.read_text(), f2.read_text()
        if _mask_wall_time(t1) != _mask_wall_time(t2):
            identical = False
    # wall_time_s is explicitly exempt from assertions (hardware noise);
    # every other byte must match.
    _report("determinism (rerun, wall-time column masked)", identical,
            f"{len(first)} csv files compared")
    assert identical
    for f1 in first:
        lines = f1.read_text().splitlines()
        assert lines[0] == "game,algo,seed,iteration,episodes,exploitability,wall_time_s"
