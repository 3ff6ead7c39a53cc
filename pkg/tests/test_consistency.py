"""Prefix-independence and cycle-consistency checks, plus the mean-payoff demo."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from skelparity import (
    DpaCondition,
    Lasso,
    Skeleton,
    lasso_value,
    product,
    trivial_skeleton,
)
from skelparity.consistency import (
    check_cycle_consistency,
    check_prefix_independence,
    mp_counterexample_report,
)
from skelparity.conditions import MeanPayoffCondition
from skelparity.errors import InputError

from conftest import (
    ABC,
    build_contrast_automaton,
    build_gen_buchi,
    build_switch_skeleton,
)


# -- prefix independence --------------------------------------------------------


def test_ab_prefix_fails_on_a_blind_skeleton(ab_prefix_condition, a_blind_skeleton):
    report = check_prefix_independence(ab_prefix_condition, a_blind_skeleton)
    assert not report.passed
    assert report.witness["w1"] == []
    assert report.witness["w2"] == ["a"]
    # self-certifying: the two prefixes genuinely differ on some continuation
    cond = ab_prefix_condition
    w1, w2 = tuple(report.witness["w1"]), tuple(report.witness["w2"])
    separator = Lasso.make(("b",), ("a",))
    v1 = lasso_value(cond, Lasso(w1 + separator.prefix, separator.period))
    v2 = lasso_value(cond, Lasso(w2 + separator.prefix, separator.period))
    assert v1 != v2


def test_gen_buchi_passes_on_switch_skeleton(gen_buchi, switch_skeleton):
    assert check_prefix_independence(gen_buchi, switch_skeleton).passed


def test_prefix_independent_condition_on_trivial(gen_buchi, trivial_abc):
    assert check_prefix_independence(gen_buchi, trivial_abc).passed


def test_ds_prefix_independence_on_own_congruence(ds_half_two):
    from skelparity.conditions import right_congruence_automaton

    rc = right_congruence_automaton(ds_half_two)
    assert check_prefix_independence(ds_half_two, rc).passed
    assert not check_prefix_independence(ds_half_two, trivial_skeleton(range(-2, 3))).passed


# -- cycle consistency -----------------------------------------------------------


def test_gen_buchi_fails_on_trivial(gen_buchi, trivial_abc):
    report = check_cycle_consistency(gen_buchi, trivial_abc)
    assert not report.passed
    w = report.witness
    assert [t[1] for t in w["support1"]] == ["a"]
    assert [t[1] for t in w["support2"]] == ["b"]
    assert w["family_value"] == "lose" and w["union_value"] == "win"
    # witness re-verification through the word oracle alone
    assert lasso_value(gen_buchi, Lasso.make([], ["a"])) == "lose"
    assert lasso_value(gen_buchi, Lasso.make([], ["b"])) == "lose"
    assert lasso_value(gen_buchi, Lasso.make([], ["a", "b"])) == "win"


def test_gen_buchi_passes_on_switch_skeleton_cycles(gen_buchi, switch_skeleton):
    assert check_cycle_consistency(gen_buchi, switch_skeleton).passed


def test_recognized_language_is_consistent_on_own_skeleton(contrast_automaton):
    cond = DpaCondition(contrast_automaton)
    sk = contrast_automaton.skeleton
    assert check_prefix_independence(cond, sk).passed
    assert check_cycle_consistency(cond, sk).passed


def test_cycle_consistency_refuses_payoff_conditions(trivial_abc):
    with pytest.raises(InputError):
        check_cycle_consistency(MeanPayoffCondition(), trivial_skeleton([-1, 1]))


# -- stability under products (random skeletons) ----------------------------------


def _random_skeleton(seed: int, alphabet, max_states=3) -> Skeleton:
    rng = random.Random(seed)
    n = rng.randint(1, max_states)
    states = [f"r{i}" for i in range(n)]
    upd = {(s, c): rng.choice(states) for s in states for c in alphabet}
    reach = {"r0"}
    work = ["r0"]
    while work:
        s = work.pop()
        for c in alphabet:
            if upd[(s, c)] not in reach:
                reach.add(upd[(s, c)])
                work.append(upd[(s, c)])
    return Skeleton.make(
        sorted(reach), "r0", alphabet, {k: v for k, v in upd.items() if k[0] in reach}
    )


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 10**6))
def test_consistency_stable_under_product(seed):
    cond = build_gen_buchi()
    base = build_switch_skeleton()
    other = _random_skeleton(seed, ABC)
    prod = product(base, other)
    assert check_prefix_independence(cond, prod).passed
    assert check_cycle_consistency(cond, prod).passed


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10**6))
def test_recognized_language_stable_under_product(seed):
    aut = build_contrast_automaton()
    cond = DpaCondition(aut)
    prod = product(aut.skeleton, _random_skeleton(seed, ABC))
    assert check_prefix_independence(cond, prod).passed
    assert check_cycle_consistency(cond, prod).passed


def test_union_closure_matches_long_concatenations(gen_buchi, switch_skeleton):
    # sampling: random concatenations of same-value cycles keep that value
    from skelparity.consistency import shortest_words_to_states
    from skelparity.conditions import right_congruence_automaton
    from skelparity.skeletons import (
        closed_walk,
        enumerate_cycle_supports,
        support_states,
    )

    rc = right_congruence_automaton(gen_buchi)
    prod = product(switch_skeleton, rc)
    prefixes = shortest_words_to_states(prod)
    supports = enumerate_cycle_supports(prod)
    rng = random.Random(7)
    for _ in range(40):
        state = rng.choice(prod.states)
        through = [g for g in supports if state in support_states(g)]
        walks = {
            g: closed_walk(prod, g, anchor=state)
            for g in through
        }
        values = {
            g: lasso_value(gen_buchi, Lasso.make(prefixes[state], tuple(walks[g])))
            for g in through
        }
        for target in ("win", "lose"):
            family = [g for g in through if values[g] == target]
            if not family:
                continue
            picks = [rng.choice(family) for _ in range(rng.randint(1, 4))]
            union = frozenset().union(*picks)
            long_period = sum((tuple(walks[g]) for g in picks), ())
            assert (
                lasso_value(gen_buchi, Lasso.make(prefixes[state], long_period))
                == target
            )
            assert values[union] == target


# -- mean payoff demonstration ------------------------------------------------------


def test_mp_report_small():
    report = mp_counterexample_report(3)
    assert report.verdict == "fail"
    assert report.witness["zero_positions"] == [2, 6, 12]
    rows = report.details["table"]
    assert rows[1]["mean_payoff"] == "-1/3"


def test_mp_report_periods_are_losing():
    cond = MeanPayoffCondition()
    for n in range(6):
        period = (1,) * n + (-1,) * (n + 1)
        assert lasso_value(cond, Lasso.make([], period)) == "lose"


def test_mp_report_rejects_zero():
    with pytest.raises(InputError):
        mp_counterexample_report(0)
