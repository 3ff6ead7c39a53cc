"""Winning conditions and their word-level oracles.

A condition is a set of infinite color words.  Concrete families supported
here: languages of deterministic parity automata, Muller-style conditions
given by a table or predicate over cycle supports of a fixed skeleton,
discounted-sum threshold conditions over integer colors, and mean-payoff /
total-payoff threshold conditions.

Ultimately periodic words (finite prefix + non-empty period) are the finite
currency for evaluating conditions; all arithmetic is exact rational, never
floating point.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import InfiniteIndexError, InputError, PreconditionError
from .skeletons import (
    DEFAULT_SUPPORT_CAP,
    Color,
    ParityAutomaton,
    Skeleton,
    State,
    Transition,
    enumerate_cycle_supports,
    trivial_skeleton,
)

WIN = "win"
LOSE = "lose"


@dataclass(frozen=True)
class Lasso:
    """Ultimately periodic word ``prefix . period^omega``."""

    prefix: tuple[Color, ...]
    period: tuple[Color, ...]

    def __post_init__(self):
        if not self.period:
            raise InputError("lasso period must be non-empty")

    @classmethod
    def make(cls, prefix: Iterable[Color], period: Iterable[Color]) -> "Lasso":
        return cls(tuple(prefix), tuple(period))

    def rotate(self) -> "Lasso":
        """Shift one period letter into the prefix; denotes the same word."""
        c = self.period[0]
        return Lasso(self.prefix + (c,), self.period[1:] + (c,))


# ---------------------------------------------------------------------------
# condition specifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DpaCondition:
    """The language of a deterministic parity automaton."""

    automaton: ParityAutomaton

    @property
    def alphabet(self):
        return self.automaton.skeleton.alphabet

    @property
    def union_invariant(self) -> bool:
        return True


@dataclass(frozen=True, eq=False)
class MullerCondition:
    """Membership decided by the set of skeleton transitions seen infinitely often.

    ``winning`` classifies cycle supports of ``skeleton``: either an explicit
    collection of winning supports, or a predicate.
    """

    skeleton: Skeleton
    winning_supports: frozenset[frozenset[Transition]] | None = None
    predicate: Callable[[frozenset[Transition]], bool] | None = None

    def __post_init__(self):
        if (self.winning_supports is None) == (self.predicate is None):
            raise InputError("give exactly one of winning_supports / predicate")

    @property
    def alphabet(self):
        return self.skeleton.alphabet

    @property
    def union_invariant(self) -> bool:
        return True

    def support_value(self, support: frozenset[Transition]) -> str:
        if self.predicate is not None:
            return WIN if self.predicate(support) else LOSE
        return WIN if support in self.winning_supports else LOSE


def sees_all_colors_condition(alphabet: Iterable[Color], needed: Iterable[Color]) -> MullerCondition:
    """Words that see every color of ``needed`` infinitely often."""
    need = frozenset(needed)
    sk = trivial_skeleton(alphabet)
    return MullerCondition(
        skeleton=sk,
        predicate=lambda sup: need <= {c for _, c in sup},
    )


@dataclass(frozen=True)
class DiscountedSumCondition:
    """Words whose discounted sum with factor ``lam`` is >= 0; colors are
    the integers in [-k, k]."""

    lam: Fraction
    k: int

    def __post_init__(self):
        if not (0 < self.lam < 1):
            raise InputError("discount factor must satisfy 0 < lambda < 1")
        if self.k < 0:
            raise InputError("k must be a natural number")

    @property
    def alphabet(self):
        return tuple(range(-self.k, self.k + 1))

    @property
    def union_invariant(self) -> bool:
        # Safe support-based reasoning is justified only for lambda = 1/n,
        # where cycle values on the gap automaton depend on states alone.
        return self.lam.numerator == 1

    @property
    def max_ds(self) -> Fraction:
        return Fraction(self.k) / (1 - self.lam)


@dataclass(frozen=True)
class MeanPayoffCondition:
    """Words whose limsup Cesaro average is >= 0; integer colors."""

    @property
    def alphabet(self):
        return None

    @property
    def union_invariant(self) -> bool:
        return False


@dataclass(frozen=True)
class TotalPayoffCondition:
    """Words whose limsup of partial sums is >= 0; integer colors."""

    @property
    def alphabet(self):
        return None

    @property
    def union_invariant(self) -> bool:
        return False


Condition = (
    DpaCondition
    | MullerCondition
    | DiscountedSumCondition
    | MeanPayoffCondition
    | TotalPayoffCondition
)


def _check_word(cond: Condition, word: Sequence[Color]):
    alpha = cond.alphabet
    if alpha is None:
        for c in word:
            if not isinstance(c, int) or isinstance(c, bool):
                raise InputError(f"color {c!r} is not an integer")
        return
    allowed = set(alpha)
    for c in word:
        if c not in allowed:
            raise InputError(f"color {c!r} not in the condition's alphabet")


# ---------------------------------------------------------------------------
# discounted sums and gaps
# ---------------------------------------------------------------------------


def discounted_sum(word: Sequence[int], lam: Fraction) -> Fraction:
    total = Fraction(0)
    power = Fraction(1)
    for c in word:
        total += power * c
        power *= lam
    return total


def discounted_lasso_sum(lasso: Lasso, lam: Fraction) -> Fraction:
    """Exact discounted sum of ``prefix . period^omega``."""
    n = len(lasso.prefix)
    m = len(lasso.period)
    return discounted_sum(lasso.prefix, lam) + lam**n * discounted_sum(
        lasso.period, lam
    ) / (1 - lam**m)


@dataclass(frozen=True)
class GapValue:
    """Residual class of a finite word under a discounted-sum condition."""

    kind: str  # "top" | "bot" | "finite"
    value: Fraction | None = None

    def __post_init__(self):
        if self.kind not in ("top", "bot", "finite"):
            raise InputError(f"bad gap kind {self.kind!r}")
        if (self.kind == "finite") != (self.value is not None):
            raise InputError("finite gaps carry a value, top/bot do not")

    @property
    def name(self) -> str:
        return str(self.value) if self.kind == "finite" else self.kind


GAP_TOP = GapValue("top")
GAP_BOT = GapValue("bot")


def finite_gap(q: Fraction | int) -> GapValue:
    return GapValue("finite", Fraction(q))


def _clamp_gap(raw: Fraction, max_ds: Fraction) -> GapValue:
    # Top is inclusive, Bot is strict-below: with the >= 0 threshold, a word
    # at gap exactly -max_ds still has one winning continuation.
    if raw >= max_ds:
        return GAP_TOP
    if raw < -max_ds:
        return GAP_BOT
    return finite_gap(raw)


def gap_step(g: GapValue, c: int, lam: Fraction, k: int) -> GapValue:
    """One-letter update ``gap(wc) = (gap(w) + c) / lam``; top/bot absorb."""
    if g.kind != "finite":
        return g
    if not isinstance(c, int) or isinstance(c, bool) or abs(c) > k:
        raise InputError(f"color {c!r} outside [-{k}, {k}]")
    return _clamp_gap((g.value + c) / lam, Fraction(k) / (1 - lam))


def gap(word: Sequence[int], lam: Fraction, k: int) -> GapValue:
    """Gap of a finite word, computed incrementally with absorbing clamps.

    The clamp applies to the empty word as well: with k = 0 every word sits
    at the inclusive top boundary already.
    """
    if not (0 < lam < 1):
        raise InputError("discount factor must satisfy 0 < lambda < 1")
    g = _clamp_gap(Fraction(0), Fraction(k) / (1 - lam))
    for c in word:
        g = gap_step(g, c, lam, k)
    return g


def gap_direct(word: Sequence[int], lam: Fraction, k: int) -> GapValue:
    """Gap from the defining formula DS(w)/lam^|w|, clamped once at the end.

    Independent of :func:`gap`; the two must agree (the clamps are absorbing
    under the one-letter recurrence).
    """
    for c in word:
        if not isinstance(c, int) or isinstance(c, bool) or abs(c) > k:
            raise InputError(f"color {c!r} outside [-{k}, {k}]")
    raw = discounted_sum(word, lam) / lam ** len(word)
    return _clamp_gap(raw, Fraction(k) / (1 - lam))


# ---------------------------------------------------------------------------
# lasso evaluation
# ---------------------------------------------------------------------------


def entered_cycle(sk: Skeleton, lasso: Lasso) -> tuple[State, frozenset[Transition]]:
    """State and transition set of the cycle a lasso eventually repeats."""
    s = sk.run_end(lasso.prefix)
    index = {s: 0}
    states = [s]
    cur = s
    while True:
        cur = sk.run_end(lasso.period, start=cur)
        if cur in index:
            first = index[cur]
            break
        index[cur] = len(states)
        states.append(cur)
    start = states[first]
    trans: set[Transition] = set()
    c = start
    for _ in range(len(states) - first):
        for col in lasso.period:
            trans.add((c, col))
            c = sk.step(c, col)
    return start, frozenset(trans)


def lasso_value(cond: Condition, lasso: Lasso) -> str:
    """Win iff the infinite word ``prefix . period^omega`` is in the condition."""
    _check_word(cond, lasso.prefix)
    _check_word(cond, lasso.period)
    if isinstance(cond, DpaCondition):
        _, cycle = entered_cycle(cond.automaton.skeleton, lasso)
        return WIN if cond.automaton.max_support_priority(cycle) % 2 == 0 else LOSE
    if isinstance(cond, MullerCondition):
        _, cycle = entered_cycle(cond.skeleton, lasso)
        return cond.support_value(cycle)
    if isinstance(cond, DiscountedSumCondition):
        return WIN if discounted_lasso_sum(lasso, cond.lam) >= 0 else LOSE
    if isinstance(cond, MeanPayoffCondition):
        return WIN if sum(lasso.period) >= 0 else LOSE
    if isinstance(cond, TotalPayoffCondition):
        period_sum = sum(lasso.period)
        if period_sum > 0:
            return WIN
        if period_sum < 0:
            return LOSE
        best = None
        running = sum(lasso.prefix)
        for c in lasso.period:
            running += c
            best = running if best is None else max(best, running)
        return WIN if best >= 0 else LOSE
    raise InputError(f"unknown condition type {type(cond).__name__}")


# ---------------------------------------------------------------------------
# residual comparison (deterministic parity automata, exact)
# ---------------------------------------------------------------------------


def _pair_skeleton(
    sk: Skeleton, q1: State, q2: State
) -> tuple[Skeleton, dict[State, tuple[State, State]]]:
    """Reachable self-product from the pair (q1, q2), with fresh state names."""
    names: dict[tuple[State, State], State] = {}
    sides: dict[State, tuple[State, State]] = {}

    def name(pair: tuple[State, State]) -> State:
        if pair not in names:
            n = f"p{len(names)}"
            names[pair] = n
            sides[n] = pair
        return names[pair]

    init = name((q1, q2))
    queue = deque([(q1, q2)])
    seen = {(q1, q2)}
    upd: dict[Transition, State] = {}
    while queue:
        a, b = queue.popleft()
        for c in sk.alphabet:
            t = (sk.step(a, c), sk.step(b, c))
            upd[(name((a, b)), c)] = name(t)
            if t not in seen:
                seen.add(t)
                queue.append(t)
    pair = Skeleton.make(list(sides), init, sk.alphabet, upd)
    return pair, sides


def _side_support(
    sides: dict[State, tuple[State, State]], support: frozenset[Transition], side: int
) -> frozenset[Transition]:
    return frozenset((sides[s][side], c) for s, c in support)


def _residual_flags(
    cond: DpaCondition | MullerCondition,
    q1: State,
    q2: State,
    cap: int,
) -> tuple[bool, bool]:
    """(some continuation wins after q1 and loses after q2, the converse)."""
    sk = cond.automaton.skeleton if isinstance(cond, DpaCondition) else cond.skeleton
    pair, sides = _pair_skeleton(sk, q1, q2)
    win1_lose2 = False
    lose1_win2 = False
    for sup in enumerate_cycle_supports(pair, cap=cap):
        left = _side_support(sides, sup, 0)
        right = _side_support(sides, sup, 1)
        if isinstance(cond, DpaCondition):
            v1 = WIN if cond.automaton.max_support_priority(left) % 2 == 0 else LOSE
            v2 = WIN if cond.automaton.max_support_priority(right) % 2 == 0 else LOSE
        else:
            v1 = cond.support_value(left)
            v2 = cond.support_value(right)
        if v1 == WIN and v2 == LOSE:
            win1_lose2 = True
        elif v1 == LOSE and v2 == WIN:
            lose1_win2 = True
        if win1_lose2 and lose1_win2:
            break
    return win1_lose2, lose1_win2


def compare_states(
    cond: DpaCondition | MullerCondition,
    q1: State,
    q2: State,
    cap: int = DEFAULT_SUPPORT_CAP,
) -> str:
    """Exact comparison of the residual languages of two automaton states."""
    win1_lose2, lose1_win2 = _residual_flags(cond, q1, q2, cap)
    if win1_lose2 and lose1_win2:
        return "incomparable"
    if win1_lose2:
        return "greater"
    if lose1_win2:
        return "less"
    return "equal"


def residual_compare(
    cond: Condition,
    w1: Sequence[Color],
    w2: Sequence[Color],
    cap: int = DEFAULT_SUPPORT_CAP,
) -> str:
    """Compare the winning continuations of two finite words.

    ``less`` means w1's continuations are a strict subset of w2's.  Decided
    exactly by classifying the cycle supports of the paired product.
    """
    if not isinstance(cond, DpaCondition):
        raise PreconditionError("residual comparison requires an automaton-backed condition")
    _check_word(cond, w1)
    _check_word(cond, w2)
    sk = cond.automaton.skeleton
    return compare_states(cond, sk.run_end(w1), sk.run_end(w2), cap)


# ---------------------------------------------------------------------------
# right-congruence automata
# ---------------------------------------------------------------------------


def _word_label(word: Sequence[Color]) -> str:
    if not word:
        return "[ε]"
    if all(isinstance(c, str) and len(c) == 1 for c in word):
        return "[" + "".join(word) + "]"
    return "[" + ",".join(str(c) for c in word) + "]"


def _quotient_by_equivalence(
    sk: Skeleton, equivalent: Callable[[State, State], bool]
) -> Skeleton:
    """Quotient of a skeleton by a residual-language equivalence on states."""
    states = list(sk.states)
    class_of: dict[State, int] = {}
    reps: list[State] = []
    for s in states:
        for i, r in enumerate(reps):
            if equivalent(s, r):
                class_of[s] = i
                break
        else:
            class_of[s] = len(reps)
            reps.append(s)
    for s in states:
        for c in sk.alphabet:
            a = class_of[sk.step(s, c)]
            b = class_of[sk.step(reps[class_of[s]], c)]
            if a != b:
                raise InputError(
                    "state equivalence is not a congruence; quotient undefined"
                )

    # shortest-word labels, BFS in canonical color order over the quotient
    labels: dict[int, str] = {}
    init_cls = class_of[sk.init]
    labels[init_cls] = _word_label(())
    queue = deque([(init_cls, ())])
    while queue:
        cls, word = queue.popleft()
        rep = reps[cls]
        for c in sk.alphabet:
            nxt = class_of[sk.step(rep, c)]
            if nxt not in labels:
                w = word + (c,)
                labels[nxt] = _word_label(w)
                queue.append((nxt, w))
    upd = {
        (labels[class_of[r]], c): labels[class_of[sk.step(r, c)]]
        for r in reps
        for c in sk.alphabet
    }
    return Skeleton.make(list(labels.values()), labels[init_cls], sk.alphabet, upd)


def right_congruence_automaton(
    cond: Condition, cap: int = DEFAULT_SUPPORT_CAP
) -> Skeleton:
    """Minimal-state automaton of the condition's right congruence.

    States are labeled by the class they denote: a shortest representative
    word for automaton-backed conditions, the gap value for discounted sums.
    """
    if isinstance(cond, (DpaCondition, MullerCondition)):
        sk = cond.automaton.skeleton if isinstance(cond, DpaCondition) else cond.skeleton
        cache: dict[tuple[State, State], bool] = {}

        def equivalent(a: State, b: State) -> bool:
            key = (a, b) if a <= b else (b, a)
            if key not in cache:
                cache[key] = compare_states(cond, key[0], key[1], cap) == "equal"
            return cache[key]

        return _quotient_by_equivalence(sk, equivalent)

    if isinstance(cond, DiscountedSumCondition):
        return _ds_congruence_automaton(cond)

    raise PreconditionError(
        "right congruence automaton supported for automaton-backed and "
        "discounted-sum conditions only"
    )


def _ds_congruence_automaton(cond: DiscountedSumCondition) -> Skeleton:
    """Word-level BFS quotient using the from-scratch gap formula.

    This is deliberately independent of the recurrence-driven construction in
    :mod:`skelparity.discounting`; the two are cross-checked in tests.
    """
    lam, k = cond.lam, cond.k
    if lam.numerator != 1 and k >= -(-(lam.denominator - lam.numerator) // lam.numerator):
        # k >= ceil(1/lam - 1) and lam != 1/n
        raise InfiniteIndexError(
            "the right congruence of this discounted-sum condition has "
            f"infinite index (lambda={lam} is not 1/n and k={k} >= ceil(1/lambda - 1)); "
            "no finite-state automaton exists"
        )
    alphabet = list(range(-k, k + 1))
    init_gap = gap_direct((), lam, k)
    states: dict[GapValue, str] = {init_gap: init_gap.name}
    words: dict[GapValue, tuple[int, ...]] = {init_gap: ()}
    upd: dict[Transition, State] = {}
    queue = deque([init_gap])
    while queue:
        g = queue.popleft()
        w = words[g]
        for c in alphabet:
            g2 = gap_direct(w + (c,), lam, k)
            if g2 not in states:
                states[g2] = g2.name
                words[g2] = w + (c,)
                queue.append(g2)
            upd[(states[g], c)] = states[g2]
    return Skeleton.make(list(states.values()), states[init_gap], alphabet, upd)
