"""Regret matching, variant update rules and full CFR runs."""

import numpy as np
import pytest

from regret_forge.games import new_game
from regret_forge.tabular import (
    RegretUpdateRule,
    TabularState,
    average_strategy,
    make_rule,
    predicted_cumulative_regret,
    regret_matching,
    regret_matching_argmax,
    run_cfr,
    run_iteration,
    update_cumulative_regret,
    update_cumulative_strategy,
)
from regret_forge.tree import compiled

from conftest import random_policy


def test_regret_matching_examples():
    assert np.allclose(regret_matching([2, 1, 1]), [0.5, 0.25, 0.25])
    assert np.allclose(regret_matching([-1, 0, -3]), [1 / 3, 1 / 3, 1 / 3])
    assert np.allclose(regret_matching([3, -1]), [1, 0])


def test_regret_matching_argmax_examples():
    assert np.allclose(regret_matching_argmax([-1, -0.5, -3]), [0, 1, 0])
    assert np.allclose(regret_matching_argmax([2, 2]), [0.5, 0.5])
    assert np.allclose(regret_matching_argmax([-1, -1]), [1, 0])
    # A vector with no signal at all stays uniform (fresh networks).
    assert np.allclose(regret_matching_argmax([0.0, 0.0]), [0.5, 0.5])


@pytest.mark.parametrize("fn", [regret_matching, regret_matching_argmax])
def test_regret_matching_is_distribution(fn):
    rng = np.random.default_rng(0)
    for _ in range(200):
        n = int(rng.integers(1, 7))
        r = rng.normal(scale=rng.uniform(0.1, 10), size=n)
        probs = fn(r)
        assert probs.min() >= 0.0
        assert abs(probs.sum() - 1.0) < 1e-12


def test_update_cumulative_regret_examples():
    dcfr_plus = make_rule("dcfr+", alpha=2.0)
    assert update_cumulative_regret(dcfr_plus, 4.0, -1.0, 2) == 1.0
    cfr_plus = make_rule("cfr+")
    assert update_cumulative_regret(cfr_plus, 0.5, -2.0, 1) == 0.0
    linear = make_rule("linear")
    assert update_cumulative_regret(linear, 1.0, 2.0, 3) == 7.0
    with pytest.raises(ValueError):
        update_cumulative_regret(cfr_plus, 0.0, 1.0, 0)


def test_dcfr_branches():
    rule = make_rule("dcfr", alpha=1.5, beta=0.0)
    # positive branch multiplies by (t-1)^1.5/((t-1)^1.5+1)
    t = 5
    d_pos = 4 ** 1.5 / (4 ** 1.5 + 1)
    assert update_cumulative_regret(rule, 2.0, 0.5, t) == pytest.approx(2.0 * d_pos + 0.5)
    # negative branch with beta=0 halves the accumulator
    assert update_cumulative_regret(rule, -2.0, 0.5, t) == pytest.approx(-1.0 + 0.5)


def test_dcfr_plus_with_unit_discount_matches_cfr_plus():
    # For large alpha and t-1 >= 2 the discount rounds to exactly 1, so the
    # update must coincide with the cfr+ clip bit for bit.
    huge = make_rule("dcfr+", alpha=200.0)
    cfr_plus = make_rule("cfr+")
    rng = np.random.default_rng(1)
    r_prev = rng.normal(size=50) ** 2  # stored accumulators are nonnegative
    r_t = rng.normal(size=50)
    for t in (3, 7, 1000):
        lhs = update_cumulative_regret(huge, r_prev, r_t, t)
        rhs = update_cumulative_regret(cfr_plus, r_prev, r_t, t)
        assert np.array_equal(lhs, rhs)


def test_predicted_cumulative_regret():
    pdcfr = make_rule("pdcfr+", alpha=1.0)  # t^1/(t^1+1) = 0.5 at t=1
    assert predicted_cumulative_regret(pdcfr, 2.0, -0.5, 1) == 0.5
    pcfr = make_rule("pcfr+")
    assert predicted_cumulative_regret(pcfr, 1.0, -3.0, 4) == 0.0
    with pytest.raises(ValueError):
        predicted_cumulative_regret(make_rule("dcfr"), 1.0, 0.0, 1)


def test_update_cumulative_strategy_examples():
    dcfr = make_rule("dcfr", gamma=2.0)
    assert update_cumulative_strategy(dcfr, 4.0, 1.0, 2) == 2.0  # 4*(1/4)+1
    cfr = make_rule("cfr")
    assert update_cumulative_strategy(cfr, 0.0, 0.3, 1) == 0.3
    cfr_plus = make_rule("cfr+")
    assert update_cumulative_strategy(cfr_plus, 1.0, 0.5, 4) == 3.0
    with pytest.raises(ValueError):
        update_cumulative_strategy(cfr, 1.0, -0.1, 1)


def test_rule_validation():
    with pytest.raises(ValueError):
        RegretUpdateRule("cfr_plus", alternating=False)
    with pytest.raises(ValueError):
        RegretUpdateRule("nope")
    with pytest.raises(ValueError):
        RegretUpdateRule("dcfr", alpha=float("inf"))
    assert make_rule("dcfr").alpha == 1.5
    assert make_rule("dcfr").gamma == 2.0
    assert make_rule("pdcfr+").alpha == 2.3


def test_first_iteration_average_is_uniform(kuhn):
    for variant in ("cfr", "cfr+", "linear", "dcfr", "dcfr+", "pcfr+", "pdcfr+"):
        policy, _ = run_cfr(kuhn, make_rule(variant), 1)
        for _, probs in policy.items():
            assert np.allclose(probs, 1.0 / len(probs)), variant


def test_average_strategy_handles_zero_rows(kuhn):
    flat = compiled(kuhn)
    state = TabularState(flat, make_rule("cfr"))
    state.cum_strategy[flat.slots_of(0)] = [3.0, 1.0]
    policy = average_strategy(state)
    assert np.allclose(policy.prob(flat.iso_keys[0], 2), [0.75, 0.25])
    assert np.allclose(policy.prob(flat.iso_keys[1], 2), [0.5, 0.5])
    # unknown infosets answer uniform
    from regret_forge.games import InfoSetId
    assert np.allclose(policy.prob(InfoSetId(0, b"missing"), 3), [1 / 3] * 3)


def test_pcfr_plus_with_zero_prediction_tracks_cfr_plus(kuhn):
    flat = compiled(kuhn)
    a = TabularState(flat, RegretUpdateRule("pcfr_plus", gamma=2.0, zero_prediction=True))
    b = TabularState(flat, make_rule("cfr+"))
    for _ in range(50):
        sa = a.strategy_slots()
        sb = b.strategy_slots()
        assert np.array_equal(sa, sb)
        run_iteration(a)
        run_iteration(b)
        assert np.array_equal(a.regret, b.regret)


def test_clipped_variants_store_nonnegative_regrets(kuhn):
    for variant in ("cfr+", "dcfr+", "pcfr+", "pdcfr+"):
        flat = compiled(kuhn)
        state = TabularState(flat, make_rule(variant))
        for _ in range(25):
            run_iteration(state)
            assert state.regret.min() >= 0.0
        assert state.cum_strategy.min() >= 0.0


def test_counterfactual_value_identity(kuhn):
    # sum_a sigma(I,a) v(I,a) = v(I) at every infoset, by construction of
    # the sweep: check sigma-weighted instantaneous regrets vanish.
    flat = compiled(kuhn)
    rng = np.random.default_rng(5)
    policy = random_policy(kuhn, rng)
    slots = flat.policy_slots(policy)
    for player in (0, 1):
        r0, r1, rc = flat.reach(slots)
        val = flat.values(slots, player)
        reach_opp = (r1 if player == 0 else r0) * rc
        edges = np.where(flat.player[flat.edge_parent] == player)[0]
        inst = np.zeros(flat.num_slots)
        np.add.at(inst, flat.edge_slot[edges],
                  reach_opp[flat.edge_parent[edges]]
                  * (val[flat.edge_child[edges]] - val[flat.edge_parent[edges]]))
        for k in range(len(flat.iso_keys)):
            if flat.iso_owner[k] != player:
                continue
            s = flat.slots_of(k)
            assert abs(float(slots[s] @ inst[s])) < 1e-10


def test_folk_improvement_from_10_to_1000(kuhn):
    for variant in ("cfr", "cfr+", "linear", "dcfr", "dcfr+", "pcfr+", "pdcfr+"):
        _, log = run_cfr(kuhn, make_rule(variant), 1000, eval_points=(10,))
        by_t = dict(log)
        assert by_t[1000] < by_t[10], variant


def test_run_cfr_validates_iterations(kuhn):
    with pytest.raises(ValueError):
        run_cfr(kuhn, make_rule("cfr"), 0)
