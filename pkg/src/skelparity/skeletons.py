"""Finite skeletons, parity automata and cycle supports.

A skeleton is a finite deterministic machine over a finite color alphabet
with no acceptance condition.  A parity automaton attaches a natural-number
priority to every transition.  A cycle support is a set of transitions whose
induced directed graph is strongly connected; it is the finite proxy used
everywhere in this package for the (infinite) family of cycles of a skeleton.

All types are immutable after construction and every function is pure, so
everything here is safe to call concurrently.  Iteration order is canonical
throughout: integer colors sort numerically before string colors, states
sort as strings, and supports sort by (size, sorted transition encoding) so
that outputs are reproducible bit-exactly.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Mapping, Sequence

from .errors import CapExceeded, InputError

Color = int | str
State = str
Transition = tuple[State, Color]

DEFAULT_SUPPORT_CAP = 100_000


def color_key(c: Color):
    """Total order on colors: integers numerically, then strings."""
    if isinstance(c, bool):
        raise InputError("booleans are not valid colors")
    if isinstance(c, int):
        return (0, c, "")
    return (1, 0, str(c))


def transition_key(t: Transition):
    return (t[0], color_key(t[1]))


def support_key(support: frozenset[Transition]):
    """Canonical order on supports: by size, then lexicographically."""
    return (len(support), tuple(sorted(transition_key(t) for t in support)))


def sorted_support(support: Iterable[Transition]) -> tuple[Transition, ...]:
    return tuple(sorted(support, key=transition_key))


def support_label(support: Iterable[Transition]) -> str:
    """Human-readable canonical name, e.g. ``[(m1,a)(m2,a)]``."""
    parts = "".join(f"({s},{c})" for s, c in sorted_support(support))
    return f"[{parts}]"


def support_states(support: Iterable[Transition]) -> frozenset[State]:
    return frozenset(s for s, _ in support)


@dataclass(frozen=True)
class Skeleton:
    """Finite deterministic machine: (states, init, total update map).

    Invariants enforced at construction: the update map is total over
    states x alphabet, and every state is reachable from ``init``.
    """

    states: tuple[State, ...]
    init: State
    alphabet: tuple[Color, ...]
    transitions: tuple[tuple[State, Color, State], ...]

    def __post_init__(self):
        state_set = set(self.states)
        if not state_set:
            raise InputError("skeleton needs at least one state")
        if self.init not in state_set:
            raise InputError(f"initial state {self.init!r} not a state")
        if not self.alphabet:
            raise InputError("alphabet must be non-empty")
        seen: set[Transition] = set()
        for s, c, t in self.transitions:
            if s not in state_set or t not in state_set:
                raise InputError(f"transition ({s!r},{c!r},{t!r}) uses unknown state")
            if c not in set(self.alphabet):
                raise InputError(f"transition color {c!r} not in alphabet")
            if (s, c) in seen:
                raise InputError(f"duplicate transition source ({s!r},{c!r})")
            seen.add((s, c))
        missing = {(s, c) for s in self.states for c in self.alphabet} - seen
        if missing:
            raise InputError(f"update map not total, missing {sorted_support(missing)}")
        unreachable = state_set - set(self._reach_from(self.init))
        if unreachable:
            raise InputError(f"unreachable states: {sorted(unreachable)}")

    @classmethod
    def make(
        cls,
        states: Iterable[State],
        init: State,
        alphabet: Iterable[Color],
        upd: Mapping[Transition, State],
    ) -> "Skeleton":
        alpha = tuple(sorted(set(alphabet), key=color_key))
        sts = tuple(sorted(set(states)))
        trans = tuple(
            (s, c, upd[(s, c)])
            for s in sts
            for c in alpha
            if (s, c) in upd
        )
        return cls(states=sts, init=init, alphabet=alpha, transitions=trans)

    @cached_property
    def _upd(self) -> dict[Transition, State]:
        return {(s, c): t for s, c, t in self.transitions}

    def step(self, state: State, color: Color) -> State:
        try:
            return self._upd[(state, color)]
        except KeyError:
            raise InputError(f"unknown transition ({state!r},{color!r})") from None

    def run(self, word: Sequence[Color], start: State | None = None) -> list[State]:
        """States visited while reading ``word``; length ``len(word)+1``."""
        s = self.init if start is None else start
        out = [s]
        for c in word:
            s = self.step(s, c)
            out.append(s)
        return out

    def run_end(self, word: Sequence[Color], start: State | None = None) -> State:
        s = self.init if start is None else start
        for c in word:
            s = self.step(s, c)
        return s

    def _reach_from(self, start: State) -> list[State]:
        seen = {start}
        order = [start]
        queue = deque([start])
        upd = {(s, c): t for s, c, t in self.transitions}
        while queue:
            s = queue.popleft()
            for c in self.alphabet:
                t = upd.get((s, c))
                if t is not None and t not in seen:
                    seen.add(t)
                    order.append(t)
                    queue.append(t)
        return order

    def canonical_form(self) -> tuple:
        """Isomorphism invariant: BFS relabeling in canonical color order."""
        number: dict[State, int] = {self.init: 0}
        order = [self.init]
        queue = deque([self.init])
        while queue:
            s = queue.popleft()
            for c in self.alphabet:
                t = self.step(s, c)
                if t not in number:
                    number[t] = len(order)
                    order.append(t)
                    queue.append(t)
        table = tuple(
            tuple(number[self.step(s, c)] for c in self.alphabet) for s in order
        )
        return (self.alphabet, table)

    def isomorphic(self, other: "Skeleton") -> bool:
        return self.canonical_form() == other.canonical_form()


def trivial_skeleton(alphabet: Iterable[Color], state: State = "m0") -> Skeleton:
    alpha = tuple(sorted(set(alphabet), key=color_key))
    return Skeleton.make([state], state, alpha, {(state, c): state for c in alpha})


def product(m1: Skeleton, m2: Skeleton) -> Skeleton:
    """Reachable part of the direct product; states are named ``s1|s2``."""
    if set(m1.alphabet) != set(m2.alphabet):
        raise InputError("product requires both skeletons to share the alphabet")
    alpha = m1.alphabet
    init = (m1.init, m2.init)
    seen = {init}
    queue = deque([init])
    upd: dict[Transition, State] = {}
    name: Callable[[tuple[State, State]], State] = lambda p: f"{p[0]}|{p[1]}"
    while queue:
        s1, s2 = queue.popleft()
        for c in alpha:
            t = (m1.step(s1, c), m2.step(s2, c))
            upd[(name((s1, s2)), c)] = name(t)
            if t not in seen:
                seen.add(t)
                queue.append(t)
    states = [name(p) for p in seen]
    return Skeleton.make(states, name(init), alpha, upd)


@dataclass(frozen=True)
class ParityAutomaton:
    """Skeleton plus a priority on every transition (transition-based acceptance)."""

    skeleton: Skeleton
    priorities: tuple[tuple[State, Color, int], ...]

    def __post_init__(self):
        keys = {(s, c) for s, c, _ in self.priorities}
        expected = {(s, c) for s, c, _ in self.skeleton.transitions}
        if keys != expected:
            raise InputError("priorities must cover exactly the skeleton transitions")
        for _, _, p in self.priorities:
            if not isinstance(p, int) or isinstance(p, bool) or p < 0:
                raise InputError("priorities must be natural numbers")

    @classmethod
    def make(cls, skeleton: Skeleton, priority: Mapping[Transition, int]) -> "ParityAutomaton":
        rows = tuple(
            (s, c, priority[(s, c)])
            for s, c, _ in skeleton.transitions
        )
        return cls(skeleton=skeleton, priorities=rows)

    @cached_property
    def _pri(self) -> dict[Transition, int]:
        return {(s, c): p for s, c, p in self.priorities}

    def priority(self, state: State, color: Color) -> int:
        try:
            return self._pri[(state, color)]
        except KeyError:
            raise InputError(f"unknown transition ({state!r},{color!r})") from None

    def max_support_priority(self, support: Iterable[Transition]) -> int:
        return max(self.priority(s, c) for s, c in support)


# ---------------------------------------------------------------------------
# strongly connected components and cycle supports
# ---------------------------------------------------------------------------


def _scc_ids(vertices: Iterable[State], arcs: Iterable[tuple[State, State]]) -> dict[State, int]:
    """Tarjan SCC, iterative.  Returns a component id per vertex."""
    adj: dict[State, list[State]] = {v: [] for v in vertices}
    for u, v in arcs:
        adj[u].append(v)
    index: dict[State, int] = {}
    low: dict[State, int] = {}
    comp: dict[State, int] = {}
    on_stack: set[State] = set()
    stack: list[State] = []
    counter = itertools.count()
    comp_counter = itertools.count()
    for root in adj:
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = next(counter)
                stack.append(v)
                on_stack.add(v)
            recurse = False
            for i in range(pi, len(adj[v])):
                w = adj[v][i]
                if w not in index:
                    work[-1] = (v, i + 1)
                    work.append((w, 0))
                    recurse = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                cid = next(comp_counter)
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp[w] = cid
                    if w == v:
                        break
            work.pop()
            if work:
                u, _ = work[-1]
                low[u] = min(low[u], low[v])
    return comp


def is_support(m: Skeleton, transitions: Iterable[Transition]) -> bool:
    """True iff the transition set induces a strongly connected graph."""
    trans = set(transitions)
    if not trans:
        return False
    vertices = {s for s, _ in trans} | {m.step(s, c) for s, c in trans}
    comp = _scc_ids(vertices, [(s, m.step(s, c)) for s, c in trans])
    return len(set(comp.values())) == 1


def _completion_exists(
    m: Skeleton,
    included: set[Transition],
    remaining: Sequence[Transition],
) -> bool:
    """Can ``included`` be extended inside ``included + remaining`` to a support?"""
    arcs = [(s, m.step(s, c)) for s, c in included]
    arcs += [(s, m.step(s, c)) for s, c in remaining]
    vertices = {u for u, _ in arcs} | {v for _, v in arcs}
    if not vertices:
        return False
    comp = _scc_ids(vertices, arcs)
    if included:
        ids = set()
        for s, c in included:
            t = m.step(s, c)
            if comp[s] != comp[t]:
                return False
            ids.add(comp[s])
        return len(ids) == 1
    return any(comp[s] == comp[m.step(s, c)] for s, c in remaining)


def enumerate_cycle_supports(
    m: Skeleton, cap: int = DEFAULT_SUPPORT_CAP
) -> list[frozenset[Transition]]:
    """All transition subsets inducing a strongly connected graph.

    Output-sensitive branch-and-prune enumeration: a branch is explored only
    while some strongly connected completion is still possible, so the cost
    is polynomial per emitted support.  Raises :class:`CapExceeded` as soon
    as the count passes ``cap``.
    """
    if cap <= 0:
        raise InputError("cap must be positive")
    edges = sorted(((s, c) for s, c, _ in m.transitions), key=transition_key)
    found: list[frozenset[Transition]] = []

    def rec(included: set[Transition], idx: int):
        if not _completion_exists(m, included, edges[idx:]):
            return
        if idx == len(edges):
            if included:
                found.append(frozenset(included))
                if len(found) > cap:
                    raise CapExceeded(
                        f"cycle-support enumeration exceeded cap {cap}", cap
                    )
            return
        e = edges[idx]
        included.add(e)
        rec(included, idx + 1)
        included.discard(e)
        rec(included, idx + 1)

    rec(set(), 0)
    found.sort(key=support_key)
    return found


def supports_through(
    supports: Iterable[frozenset[Transition]], state: State
) -> list[frozenset[Transition]]:
    return [g for g in supports if state in support_states(g)]


def closed_walk(m: Skeleton, support: frozenset[Transition], anchor: State | None = None) -> list[Color]:
    """Colors of a deterministic closed walk from ``anchor`` covering the support.

    The walk traverses every transition of the support at least once and
    returns to the anchor (by default the canonically least state of the
    support).  Strong connectivity guarantees existence.
    """
    if not support:
        raise InputError("empty support has no covering walk")
    states = sorted(support_states(support))
    if anchor is None:
        anchor = states[0]
    if anchor not in states:
        raise InputError(f"anchor {anchor!r} is not on the support")
    out_edges: dict[State, list[Transition]] = {}
    for t in sorted(support, key=transition_key):
        out_edges.setdefault(t[0], []).append(t)

    def path_colors(src: State, dst: State) -> list[Color]:
        if src == dst:
            return []
        prev: dict[State, Transition] = {}
        queue = deque([src])
        while queue:
            v = queue.popleft()
            for s, c in out_edges.get(v, ()):
                w = m.step(s, c)
                if w not in prev and w != src:
                    prev[w] = (s, c)
                    if w == dst:
                        queue.clear()
                        break
                    queue.append(w)
        if dst not in prev:
            raise InputError("support is not strongly connected")
        rev: list[Color] = []
        v = dst
        while v != src:
            s, c = prev[v]
            rev.append(c)
            v = s
        return rev[::-1]

    walk: list[Color] = []
    current = anchor
    uncovered = set(support)

    def traverse(colors: list[Color]):
        nonlocal current
        for c in colors:
            uncovered.discard((current, c))
            walk.append(c)
            current = m.step(current, c)

    while uncovered:
        target = min(uncovered, key=transition_key)
        traverse(path_colors(current, target[0]))
        traverse([target[1]])
    traverse(path_colors(current, anchor))
    return walk


def walk_transitions(m: Skeleton, start: State, word: Sequence[Color]) -> frozenset[Transition]:
    """Transition set traversed when reading ``word`` from ``start``."""
    out = set()
    s = start
    for c in word:
        out.add((s, c))
        s = m.step(s, c)
    return frozenset(out)


def color_abstraction(aut: ParityAutomaton) -> dict:
    """Coarsest merge of colors acting identically on every state.

    Two colors are merged iff they induce the same successor and the same
    priority at every state.  Returns the partition plus a map from each
    color to the canonical representative of its class.
    """
    sk = aut.skeleton
    signature: dict[Color, tuple] = {}
    for c in sk.alphabet:
        signature[c] = tuple(
            (sk.step(s, c), aut.priority(s, c)) for s in sk.states
        )
    groups: dict[tuple, list[Color]] = {}
    for c in sk.alphabet:
        groups.setdefault(signature[c], []).append(c)
    classes = sorted(
        (sorted(g, key=color_key) for g in groups.values()),
        key=lambda g: color_key(g[0]),
    )
    representative = {c: cls[0] for cls in classes for c in cls}
    return {"classes": [list(cls) for cls in classes], "representative": representative}
