"""Lasso oracles, gaps, residual comparison, right-congruence automata."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from skelparity import (
    DiscountedSumCondition,
    DpaCondition,
    Lasso,
    MeanPayoffCondition,
    ParityAutomaton,
    TotalPayoffCondition,
    gap,
    lasso_value,
    residual_compare,
    right_congruence_automaton,
    sees_all_colors_condition,
    trivial_skeleton,
)
from skelparity.conditions import (
    GAP_BOT,
    GAP_TOP,
    compare_states,
    discounted_lasso_sum,
    discounted_sum,
    finite_gap,
    gap_direct,
)
from skelparity.errors import InfiniteIndexError, InputError, PreconditionError

HALF = Fraction(1, 2)


# -- lasso evaluation ---------------------------------------------------------


def test_lasso_needs_period():
    with pytest.raises(InputError):
        Lasso.make(["a"], [])


def test_dpa_lasso_on_contrast_automaton(contrast_automaton):
    cond = DpaCondition(contrast_automaton)
    assert lasso_value(cond, Lasso.make([], ["b"])) == "lose"
    assert lasso_value(cond, Lasso.make([], ["a", "a"])) == "win"
    assert lasso_value(cond, Lasso.make(["a"], ["b"])) == "win"
    assert lasso_value(cond, Lasso.make([], ["c"])) == "lose"


def test_ds_lasso_geometric_series():
    # hand computation: alternating +1/-1 sums to 1/(1+lam)
    cond = DiscountedSumCondition(HALF, 2)
    lasso = Lasso.make([], [1, -1])
    assert discounted_lasso_sum(lasso, HALF) == Fraction(2, 3)
    assert lasso_value(cond, lasso) == "win"
    # partial-sum convergence cross-check
    word = [1, -1] * 40
    partial = discounted_sum(word, HALF)
    tail = HALF ** len(word) * cond.max_ds
    assert partial - tail <= Fraction(2, 3) <= partial + tail


def test_mean_payoff_lasso():
    cond = MeanPayoffCondition()
    assert lasso_value(cond, Lasso.make([], [1, -1, -1])) == "lose"
    assert lasso_value(cond, Lasso.make([-1], [1, -1, 1])) == "win"


def test_total_payoff_lasso():
    cond = TotalPayoffCondition()
    assert lasso_value(cond, Lasso.make([], [1, -1])) == "win"  # sum 0, peak 1
    assert lasso_value(cond, Lasso.make([-2], [1, -1])) == "lose"  # peak -1
    assert lasso_value(cond, Lasso.make([-5], [1])) == "win"  # diverges up
    assert lasso_value(cond, Lasso.make([5], [-1])) == "lose"  # diverges down


def test_alphabet_is_enforced(gen_buchi):
    with pytest.raises(InputError):
        lasso_value(gen_buchi, Lasso.make([], ["z"]))
    with pytest.raises(InputError):
        lasso_value(DiscountedSumCondition(HALF, 1), Lasso.make([], [2]))


from conftest import build_contrast_automaton

_LASSO_CONDITIONS = [
    ("dpa-contrast", lambda: DpaCondition(build_contrast_automaton())),
    ("muller-gen-buchi", lambda: sees_all_colors_condition(("a", "b", "c"), ("a", "b"))),
    ("ds", lambda: DiscountedSumCondition(HALF, 2)),
    ("ds-third", lambda: DiscountedSumCondition(Fraction(1, 3), 1)),
    ("mp", MeanPayoffCondition),
    ("tp", TotalPayoffCondition),
]


@pytest.mark.parametrize("name,make", _LASSO_CONDITIONS)
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_lasso_value_rotation_and_repetition(name, make, data):
    cond_obj = make()
    alphabet = tuple(cond_obj.alphabet) if cond_obj.alphabet else (-1, 0, 1)
    letters = st.sampled_from(alphabet)
    prefix = tuple(data.draw(st.lists(letters, max_size=4)))
    period = tuple(data.draw(st.lists(letters, min_size=1, max_size=4)))
    base = lasso_value(cond_obj, Lasso(prefix, period))
    assert lasso_value(cond_obj, Lasso(prefix, period * 2)) == base
    cut = data.draw(st.integers(0, len(period)))
    v1, v2 = period[:cut], period[cut:]
    assert lasso_value(cond_obj, Lasso(prefix + v1, v2 + v1)) == base


# -- gaps -----------------------------------------------------------------------


def test_gap_documented_values():
    assert gap([], HALF, 2) == finite_gap(0)
    assert gap([1], HALF, 2) == finite_gap(2)
    assert gap([2], HALF, 2) == GAP_TOP  # top is inclusive at 4
    assert gap([-2], HALF, 2) == finite_gap(-4)  # bot is strict below -4
    assert gap([-2, -1], HALF, 2) == GAP_BOT


def test_gap_clamps_absorb():
    assert gap([2, -2, -2, -2], HALF, 2) == GAP_TOP
    assert gap([-2, -2, 2, 2], HALF, 2) == GAP_BOT


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-2, 2), max_size=10))
def test_gap_incremental_equals_direct_formula(word):
    assert gap(word, HALF, 2) == gap_direct(word, HALF, 2)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.integers(-2, 2), max_size=5),
    st.lists(st.integers(-2, 2), min_size=1, max_size=5),
)
def test_gap_decides_lasso_value(prefix, period):
    cond = DiscountedSumCondition(HALF, 2)
    g = gap(prefix, HALF, 2)
    value = lasso_value(cond, Lasso.make(prefix, period))
    if g == GAP_TOP:
        assert value == "win"
    elif g == GAP_BOT:
        assert value == "lose"
    else:
        tail = discounted_lasso_sum(Lasso.make([], period), HALF)
        assert (value == "win") == (tail >= -g.value)


# -- residual comparison --------------------------------------------------------


def test_residual_compare_reflexive(ab_prefix_condition):
    assert residual_compare(ab_prefix_condition, ["a"], ["a"]) == "equal"
    assert residual_compare(ab_prefix_condition, [], []) == "equal"


def test_residual_compare_incomparable(ab_prefix_condition):
    # oracle by hand: after the empty word only ab... wins; after "a" only b...
    # wins; continuation "b..." separates one way, "ab..." the other
    assert residual_compare(ab_prefix_condition, [], ["a"]) == "incomparable"
    # sampled cross-check
    cond = ab_prefix_condition
    sk = cond.automaton.skeleton
    sep1 = Lasso.make(("b",), ("a",))  # wins after "a", loses after ""
    assert lasso_value(cond, Lasso(("a",) + sep1.prefix, sep1.period)) == "win"
    assert lasso_value(cond, sep1) == "lose"
    sep2 = Lasso.make(("a", "b"), ("a",))  # wins after "", loses after "a"
    assert lasso_value(cond, sep2) == "win"
    assert lasso_value(cond, Lasso(("a",) + sep2.prefix, sep2.period)) == "lose"


def test_residual_compare_strict_inclusion_on_gap_automaton():
    from skelparity.discounting import gap_automaton

    ga = gap_automaton(HALF, 2)
    aut = ParityAutomaton.make(
        ga.skeleton,
        {
            (s, c): (1 if ga.skeleton.step(s, c) == "bot" or s == "bot" else 0)
            for s, c, _ in ga.skeleton.transitions
        },
    )
    cond = DpaCondition(aut)
    # (-1) reaches gap -2; the empty word stays at gap 0
    assert ga.skeleton.run_end([-1]) == "-2"
    assert residual_compare(cond, [-1], []) == "less"
    assert residual_compare(cond, [], [-1]) == "greater"


def test_residual_compare_requires_automaton_backing():
    with pytest.raises(PreconditionError):
        residual_compare(MeanPayoffCondition(), [1], [-1])


# -- right congruence -------------------------------------------------------------


def test_rc_of_ds_half_two_matches_expected_table(ds_half_two):
    rc = right_congruence_automaton(ds_half_two)
    assert set(rc.states) == {"0", "2", "-2", "-4", "top", "bot"}
    assert rc.init == "0"
    table = {(s, c): t for s, c, t in rc.transitions}
    assert table[("0", 1)] == "2"
    assert table[("0", 2)] == "top"
    assert table[("2", -2)] == "0"
    assert table[("2", -1)] == "2"
    assert table[("-2", 0)] == "-4"
    assert table[("-4", 2)] == "-4"
    assert all(table[("bot", c)] == "bot" for c in range(-2, 3))


def test_rc_of_ab_prefix_language(ab_prefix_condition):
    rc = right_congruence_automaton(ab_prefix_condition)
    assert set(rc.states) == {"[ε]", "[a]", "[ab]", "[b]"}
    assert rc.init == "[ε]"


def test_rc_of_prefix_independent_condition_is_trivial():
    sk = trivial_skeleton(["a", "b"])
    buchi_a = ParityAutomaton.make(sk, {("m0", "a"): 0, ("m0", "b"): 1})
    rc = right_congruence_automaton(DpaCondition(buchi_a))
    assert len(rc.states) == 1


def test_rc_infinite_index_is_an_error():
    with pytest.raises(InfiniteIndexError):
        right_congruence_automaton(DiscountedSumCondition(Fraction(2, 3), 1))


def test_rc_unsupported_for_payoff_conditions():
    with pytest.raises(PreconditionError):
        right_congruence_automaton(MeanPayoffCondition())


def test_rc_three_class_case():
    rc = right_congruence_automaton(DiscountedSumCondition(Fraction(2, 5), 1))
    assert set(rc.states) == {"0", "top", "bot"}


def test_rc_states_pairwise_distinct(ab_prefix_condition):
    rc = right_congruence_automaton(ab_prefix_condition)
    # distinct classes must stay distinguishable through the original automaton
    sk = ab_prefix_condition.automaton.skeleton
    for q1 in sk.states:
        for q2 in sk.states:
            got = compare_states(ab_prefix_condition, q1, q2)
            assert (got == "equal") == (q1 == q2)


def test_rc_quotients_redundant_states(gen_buchi, switch_skeleton):
    # a parity automaton with two copies of the same residual collapses
    aut = ParityAutomaton.make(
        switch_skeleton,
        {
            ("init", "a"): 1,
            ("init", "b"): 2,
            ("init", "c"): 1,
            ("m2", "a"): 2,
            ("m2", "b"): 1,
            ("m2", "c"): 1,
        },
    )
    rc = right_congruence_automaton(DpaCondition(aut))
    assert len(rc.states) == 1  # the language is prefix-independent
