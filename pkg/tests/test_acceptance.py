"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
lines.  Tolerances are exact (rational arithmetic) unless a runtime budget
is stated, in which case wall-clock time is asserted against it.
"""

import io
import random
import time
from contextlib import contextmanager, redirect_stdout
from fractions import Fraction
from pathlib import Path

from skelparity import (
    DiscountedSumCondition,
    DpaCondition,
    Lasso,
    ParityAutomaton,
    lasso_value,
    trivial_skeleton,
)
from skelparity.cli import main
from skelparity.consistency import (
    check_cycle_consistency,
    check_prefix_independence,
    mp_counterexample_report,
)
from skelparity.discounting import (
    classify_ds,
    gap_automaton,
    greedy_expansion,
    infinite_gap_sequence,
)
from skelparity.games import ParityGame, brute_force_regions, lift_experiment, solve_parity
from skelparity.skeletons import support_label
from skelparity.synthesis import (
    assign_priorities,
    build_cycle_preorder,
    synthesize,
    verify_synthesis,
)

from conftest import (
    build_a_blind_skeleton,
    build_ab_prefix_automaton,
    build_contrast_automaton,
    build_contrast_muller,
    build_contrast_skeleton,
    build_gen_buchi,
    build_switch_skeleton,
)

GOLDEN = Path(__file__).parent / "golden"

f = frozenset


@contextmanager
def criterion(number: int, label: str, budget: float | None = None):
    start = time.monotonic()
    try:
        yield
    except BaseException:
        print(f"criterion {number:2d} [{label}]: FAIL")
        raise
    elapsed = time.monotonic() - start
    if budget is not None:
        assert elapsed < budget, f"criterion {number} exceeded {budget}s ({elapsed:.1f}s)"
    print(f"criterion {number:2d} [{label}]: PASS ({elapsed:.2f}s)")


def test_c01_gap_automaton_golden_file():
    with criterion(1, "gap automaton file reproduction", budget=1.0):
        buf = io.StringIO()
        with redirect_stdout(buf):
            code = main(["ds", "gap-automaton", "--lambda", "1/2", "--k", "2"])
        assert code == 0
        golden = (GOLDEN / "gap_automaton_half_k2.json").read_text(encoding="utf-8")
        assert buf.getvalue() == golden
        # structural spot checks on top of byte identity
        import json

        doc = json.loads(golden)
        assert sorted(doc["automaton"]["states"]) == ["-2", "-4", "0", "2", "bot", "top"]
        assert len(doc["automaton"]["upd"]) == 30


def test_c02_class_preorder_reproduction():
    with criterion(2, "cycle-class preorder", budget=5.0):
        table = build_cycle_preorder(build_contrast_skeleton(), build_contrast_muller())
        assert len(table.classes) == 4
        m1b = support_label(f({("m1", "b")}))
        aa = support_label(f({("m1", "a"), ("m2", "a")}))
        m2b = support_label(f({("m2", "b")}))
        m1c = support_label(f({("m1", "c")}))
        assert sorted(table.hasse_edges()) == sorted(
            [(m1b, aa), (aa, m1c), (m2b, m1c)]
        )


def test_c03_handpicked_numbering_transfers_exactly():
    with criterion(3, "worked priority example"):
        table = build_cycle_preorder(build_contrast_skeleton(), build_contrast_muller())
        numbering = {
            support_label(f({("m1", "c")})): 5,
            support_label(f({("m1", "a"), ("m2", "a")})): 2,
            support_label(f({("m2", "b")})): 4,
            support_label(f({("m1", "b")})): 1,
        }
        aut = assign_priorities(build_contrast_skeleton(), table, numbering)
        pri = {(s, c): p for s, c, p in aut.priorities}
        assert pri[("m1", "c")] == 5
        assert pri[("m1", "a")] == 2 and pri[("m2", "a")] == 2
        assert pri[("m2", "b")] == 4 and pri[("m2", "c")] == 4
        assert pri[("m1", "b")] == 1


def test_c04_synthesis_soundness_four_instances():
    with criterion(4, "synthesis soundness", budget=30.0):
        instances = [
            ("see-a-and-b", build_gen_buchi(), build_switch_skeleton(), False),
            (
                "ab-prefix",
                DpaCondition(build_ab_prefix_automaton()),
                trivial_skeleton(("a", "b")),
                True,
            ),
            ("priority-contrast", build_contrast_muller(), build_contrast_skeleton(), False),
            (
                "discounted-half-two",
                DiscountedSumCondition(Fraction(1, 2), 2),
                trivial_skeleton(range(-2, 3)),
                True,
            ),
        ]
        for name, cond, skeleton, transient in instances:
            result = synthesize(
                cond, skeleton, samples=1000, seed=0, allow_transient=transient
            )
            report = result.verify
            assert report.passed, name
            assert report.support_mismatch is None, name
            assert report.lasso_mismatch is None, name
            assert report.lassos_checked == 1000, name
            # the parity law holds on every support, not a sample
            aut = result.automaton
            for sup, value in result.table.supports:
                assert (aut.max_support_priority(sup) % 2 == 0) == (value == "win"), name


def test_c05_discounted_sum_classification():
    with criterion(5, "regularity classification"):
        got = classify_ds(Fraction(2, 5), 1)
        assert got.verdict == "three-class"
        got = classify_ds(Fraction(1, 2), 2)
        assert (got.verdict, got.states) == ("finite-gap", 6)
        got = classify_ds(Fraction(2, 3), 1)
        assert got.verdict == "infinite-index"
        three = gap_automaton(Fraction(2, 5), 1)
        assert len(three.skeleton.states) == 3


def test_c06_distinct_gap_sequence():
    with criterion(6, "infinite gap witness", budget=1.0):
        out = infinite_gap_sequence(Fraction(2, 3), 20)
        gaps = out["gaps"]
        assert len(gaps) == 20 and len(set(gaps)) == 20
        assert gaps[0] == Fraction(3, 2) and gaps[1] == Fraction(3, 4)
        for i, g in enumerate(gaps, start=1):
            assert g.denominator == 2**i


def test_c07_mean_payoff_counterexample():
    with criterion(7, "mean-payoff word family"):
        report = mp_counterexample_report(50)
        assert report.verdict == "fail"
        rows = report.details["table"]
        for n in range(51):
            assert Fraction(rows[n]["mean_payoff"]) == Fraction(-1, 2 * n + 1)
        assert report.witness["zero_positions"] == [n * n + n for n in range(1, 51)]


def test_c08_solver_certification():
    with criterion(8, "solver vs brute force", budget=60.0):
        def seeded_game(seed: int) -> ParityGame:
            rng = random.Random(seed)
            n = rng.randint(1, 6)
            states = [f"s{i}" for i in range(n)]
            owner = {s: rng.choice((1, 2)) for s in states}
            edges = set()
            for s in states:
                for _ in range(rng.randint(1, 3)):
                    edges.add(
                        (s, rng.choice("ab"), rng.choice(states), rng.randint(0, 2))
                    )
            return ParityGame.make(states, owner, edges)

        disagreements = 0
        for seed in range(200):
            g = seeded_game(seed)
            fast = solve_parity(g).regions
            slow = brute_force_regions(g)
            if fast != slow:
                disagreements += 1
            assert fast[1] | fast[2] == frozenset(g.states)
            assert not (fast[1] & fast[2])
        assert disagreements == 0


def test_c09_lift_experiments():
    with criterion(9, "one-to-two-player lift", budget=120.0):
        rep = lift_experiment(build_gen_buchi(), build_switch_skeleton(), 100, 8, seed=0)
        assert rep.checks == 200 and rep.all_passed
        rep2 = lift_experiment(
            DiscountedSumCondition(Fraction(1, 2), 2),
            trivial_skeleton(range(-2, 3)),
            100,
            8,
            seed=0,
        )
        assert rep2.checks == 200 and rep2.all_passed


def test_c10_negative_controls():
    with criterion(10, "negative controls"):
        # prefix-independence failure with the documented witness
        abc = DpaCondition(build_ab_prefix_automaton())
        report = check_prefix_independence(abc, build_a_blind_skeleton())
        assert not report.passed
        assert (report.witness["w1"], report.witness["w2"]) == ([], ["a"])
        separator = Lasso.make(("b",), ("a",))
        assert lasso_value(abc, separator) != lasso_value(
            abc, Lasso(("a",) + separator.prefix, separator.period)
        )

        # cycle-consistency failure with the documented witness
        gb = build_gen_buchi()
        report = check_cycle_consistency(gb, trivial_skeleton(("a", "b", "c")))
        assert not report.passed
        colors1 = [row[1] for row in report.witness["support1"]]
        colors2 = [row[1] for row in report.witness["support2"]]
        assert (colors1, colors2) == (["a"], ["b"])
        assert lasso_value(gb, Lasso.make((), ("a",))) == "lose"
        assert lasso_value(gb, Lasso.make((), ("b",))) == "lose"
        assert lasso_value(gb, Lasso.make((), ("a", "b"))) == "win"

        # verification failure on a mutated automaton with the documented witness
        original = build_contrast_automaton()
        mutated = ParityAutomaton.make(
            original.skeleton,
            {**{(s, c): p for s, c, p in original.priorities}, ("m1", "c"): 2},
        )
        report = verify_synthesis(mutated, build_contrast_muller(), samples=200, seed=0)
        assert not report.passed
        assert report.support_mismatch["support"] == [["m1", "c"]]
        assert lasso_value(build_contrast_muller(), Lasso.make((), ("c",))) == "lose"
        assert mutated.max_support_priority(f({("m1", "c")})) % 2 == 0


def test_c11_greedy_expansion():
    with criterion(11, "greedy expansion"):
        digits, remainder = greedy_expansion(Fraction(1, 3), Fraction(1, 2), 1, 6)
        assert digits == (0, 0, 1, 0, 1, 0)
        assert remainder == Fraction(1, 48)
        rng = random.Random(0)
        lam, k = Fraction(1, 2), 1
        bound = Fraction(k) / (1 - lam)
        for _ in range(100):
            x = Fraction(rng.randint(0, 10**6), 10**6) * bound
            if rng.random() < 0.5:
                x = -x
            n = rng.randint(1, 64)
            _, rem = greedy_expansion(x, lam, k, n)
            assert abs(rem) <= bound * lam**n
