"""Finite edge-colored arenas, parity-game solving and skeleton strategies.

The solver is the classical recursive attractor decomposition, run on a
state-priority subdivision of the edge-priority game and certified in tests
against a brute-force enumeration of positional strategies.  Strategies
computed on a product game project to next-move tables keyed by (arena
state, memory state).
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

from .conditions import Condition, Lasso
from .errors import CapExceeded, InputError
from .skeletons import Color, ParityAutomaton, Skeleton, State, color_key

Edge = tuple  # (src, color, dst)
GameEdge = tuple  # (src, color, dst, priority)


@dataclass(frozen=True, eq=False)
class Arena:
    """Two-player edge-colored game graph; every state has an outgoing edge."""

    states: tuple[State, ...]
    owners: tuple[tuple[State, int], ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        state_set = set(self.states)
        owner = dict(self.owners)
        if set(owner) != state_set:
            raise InputError("owner map must cover exactly the states")
        if not all(p in (1, 2) for p in owner.values()):
            raise InputError("owners must be player 1 or player 2")
        blocked = state_set - {e[0] for e in self.edges}
        if blocked:
            raise InputError(f"blocking states (no outgoing edge): {sorted(blocked)}")
        for s, _, t in self.edges:
            if s not in state_set or t not in state_set:
                raise InputError(f"edge uses unknown state: {(s, t)}")

    @classmethod
    def make(
        cls,
        states: Iterable[State],
        owner: Mapping[State, int],
        edges: Iterable[Edge],
    ) -> "Arena":
        sts = tuple(sorted(set(states)))
        rows = tuple(sorted(owner.items()))
        edg = tuple(
            sorted(set(tuple(e) for e in edges), key=lambda e: (e[0], color_key(e[1]), e[2]))
        )
        return cls(states=sts, owners=rows, edges=edg)

    @cached_property
    def owner(self) -> dict[State, int]:
        return dict(self.owners)

    @cached_property
    def alphabet(self) -> tuple[Color, ...]:
        return tuple(sorted({c for _, c, _ in self.edges}, key=color_key))

    def out_edges(self, s: State) -> list[Edge]:
        return [e for e in self.edges if e[0] == s]


def _gstate_key(v):
    return str(v)


def _gedge_key(e: GameEdge):
    return (_gstate_key(e[0]), color_key(e[1]), _gstate_key(e[2]), e[3])


@dataclass(frozen=True, eq=False)
class ParityGame:
    """Arena with a natural-number priority on every edge."""

    states: tuple
    owners: tuple
    edges: tuple[GameEdge, ...]

    def __post_init__(self):
        state_set = set(self.states)
        owner = dict(self.owners)
        if set(owner) != state_set:
            raise InputError("owner map must cover exactly the states")
        blocked = state_set - {e[0] for e in self.edges}
        if blocked:
            raise InputError("parity game must be non-blocking")
        for _, _, _, p in self.edges:
            if not isinstance(p, int) or isinstance(p, bool) or p < 0:
                raise InputError("edge priorities must be natural numbers")

    @classmethod
    def make(cls, states, owner: Mapping, edges: Iterable[GameEdge]) -> "ParityGame":
        sts = tuple(sorted(set(states), key=_gstate_key))
        rows = tuple(sorted(owner.items(), key=lambda kv: _gstate_key(kv[0])))
        edg = tuple(sorted(set(tuple(e) for e in edges), key=_gedge_key))
        return cls(states=sts, owners=rows, edges=edg)

    @cached_property
    def owner(self) -> dict:
        return dict(self.owners)

    @cached_property
    def out_edges_map(self) -> dict:
        out: dict = {s: [] for s in self.states}
        for e in self.edges:
            out[e[0]].append(e)
        return out

    def flip_parity(self) -> "ParityGame":
        """Add one to every priority, swapping the winning parities."""
        return ParityGame.make(
            self.states,
            self.owner,
            [(u, c, v, p + 1) for u, c, v, p in self.edges],
        )


def product_game(arena: Arena, aut: ParityAutomaton) -> ParityGame:
    """Arena steered by the automaton; states are (arena state, memory state).

    Contains the reachable part from every (s, initial memory) pair; each
    arena edge (s, c, s') yields a game edge ((s, m), c, (s', upd(m, c)))
    carrying the automaton's priority for (m, c).
    """
    sk = aut.skeleton
    arena_colors = set(arena.alphabet)
    if not arena_colors <= set(sk.alphabet):
        raise InputError("arena colors must be contained in the automaton alphabet")
    out_by_state: dict[State, list[Edge]] = {s: [] for s in arena.states}
    for e in arena.edges:
        out_by_state[e[0]].append(e)
    starts = [(s, sk.init) for s in arena.states]
    seen = set(starts)
    queue = deque(starts)
    edges: list[GameEdge] = []
    while queue:
        s, m = queue.popleft()
        for (_, c, t) in out_by_state[s]:
            m2 = sk.step(m, c)
            target = (t, m2)
            edges.append(((s, m), c, target, aut.priority(m, c)))
            if target not in seen:
                seen.add(target)
                queue.append(target)
    owner = {(s, m): arena.owner[s] for (s, m) in seen}
    return ParityGame.make(seen, owner, edges)


# ---------------------------------------------------------------------------
# solving
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Solution:
    regions: dict  # player -> frozenset of states
    strategy: dict  # player -> {state: GameEdge}


def solve_parity(g: ParityGame) -> Solution:
    """Exact regions and uniform positional strategies for both players.

    Recursive attractor decomposition on a subdivision carrying edge
    priorities on inserted midpoints (original states get priority 0, which
    never raises the limsup since priorities are naturals).
    """
    # subdivision nodes: ("s", state) and ("e", edge)
    succ: dict = {}
    pri: dict = {}
    owner: dict = {}
    for s in g.states:
        node = ("s", s)
        succ[node] = [("e", e) for e in g.out_edges_map[s]]
        pri[node] = 0
        owner[node] = g.owner[s]
    for e in g.edges:
        node = ("e", e)
        succ[node] = [("s", e[2])]
        pri[node] = e[3]
        owner[node] = 1

    preds: dict = {v: [] for v in succ}
    for u, vs in succ.items():
        for v in vs:
            preds[v].append(u)

    node_order = {v: i for i, v in enumerate(sorted(succ, key=_node_sort_key))}

    def attractor(alive: set, target: set, player: int):
        attr = set(target)
        strat: dict = {}
        counters = {
            v: sum(1 for w in succ[v] if w in alive)
            for v in alive
            if owner[v] != player
        }
        queue = deque(sorted(target, key=node_order.__getitem__))
        while queue:
            v = queue.popleft()
            for u in sorted(preds[v], key=node_order.__getitem__):
                if u not in alive or u in attr:
                    continue
                if owner[u] == player:
                    attr.add(u)
                    strat[u] = v
                    queue.append(u)
                else:
                    counters[u] -= 1
                    if counters[u] == 0:
                        attr.add(u)
                        queue.append(u)
        return attr, strat

    def zielonka(alive: set):
        if not alive:
            return {1: set(), 2: set()}, {1: {}, 2: {}}
        d = max(pri[v] for v in alive)
        p = 1 if d % 2 == 0 else 2
        o = 3 - p
        target = {v for v in alive if pri[v] == d}
        attr, attr_strat = attractor(alive, target, p)
        regions, strats = zielonka(alive - attr)
        if not regions[o]:
            strat_p = dict(strats[p])
            strat_p.update(attr_strat)
            for v in sorted(alive, key=node_order.__getitem__):
                if owner[v] == p and v not in strat_p:
                    inside = [w for w in succ[v] if w in alive]
                    strat_p[v] = min(inside, key=node_order.__getitem__)
            return {p: set(alive), o: set()}, {p: strat_p, o: {}}
        escape, escape_strat = attractor(alive, regions[o], o)
        regions2, strats2 = zielonka(alive - escape)
        strat_o = dict(strats2[o])
        strat_o.update(strats[o])
        strat_o.update(escape_strat)
        return (
            {p: regions2[p], o: regions2[o] | escape},
            {p: strats2[p], o: strat_o},
        )

    regions, strats = zielonka(set(succ))
    out_regions = {
        1: frozenset(s for s in g.states if ("s", s) in regions[1]),
        2: frozenset(s for s in g.states if ("s", s) in regions[2]),
    }
    out_strategy: dict = {1: {}, 2: {}}
    for player in (1, 2):
        for s in out_regions[player]:
            if g.owner[s] != player:
                continue
            chosen = strats[player].get(("s", s))
            if chosen is None:
                # interior of an attractor layer never queried; any edge
                # staying in the region preserves the win
                inside = [
                    e for e in g.out_edges_map[s] if ("e", e) in regions[player]
                ]
                chosen = ("e", min(inside, key=_gedge_key))
            out_strategy[player][s] = chosen[1]
    return Solution(regions=out_regions, strategy=out_strategy)


def _node_sort_key(node):
    kind, payload = node
    if kind == "s":
        return (0, _gstate_key(payload), ("", (0, 0, ""), "", -1))
    return (1, _gstate_key(payload[0]), _gedge_key(payload))


def brute_force_regions(g: ParityGame) -> dict:
    """Winning regions by exhaustive enumeration of positional strategies.

    Positional determinacy of parity games justifies restricting both
    players to positional strategies.  Intended as a testing oracle; capped
    at 12 states and out-degree 4.
    """
    if len(g.states) > 12:
        raise CapExceeded("brute force capped at 12 states", 12)
    if any(len(es) > 4 for es in g.out_edges_map.values()):
        raise CapExceeded("brute force capped at out-degree 4", 4)

    def play_winner(start, choice: dict) -> int:
        seen: dict = {}
        path: list[GameEdge] = []
        v = start
        while v not in seen:
            seen[v] = len(path)
            e = choice[v]
            path.append(e)
            v = e[2]
        cycle = path[seen[v]:]
        top = max(e[3] for e in cycle)
        return 1 if top % 2 == 0 else 2

    def owned(player: int):
        return [s for s in g.states if g.owner[s] == player]

    def profiles(player: int):
        states = owned(player)
        return (
            dict(zip(states, combo))
            for combo in itertools.product(*(g.out_edges_map[s] for s in states))
        )

    def winning_region(player: int) -> frozenset:
        opponent = 3 - player
        region: set = set()
        for mine in profiles(player):
            candidates = set(g.states) - region
            for theirs in profiles(opponent):
                choice = {**mine, **theirs}
                candidates = {
                    s for s in candidates if play_winner(s, choice) == player
                }
                if not candidates:
                    break
            region |= candidates
        return frozenset(region)

    return {1: winning_region(1), 2: winning_region(2)}


# ---------------------------------------------------------------------------
# skeleton strategies
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SkeletonStrategy:
    """Next-move table keyed by (arena state, memory state)."""

    skeleton: Skeleton
    nxt: dict  # (arena state, memory state) -> arena Edge


def strategy_project(
    arena: Arena, aut: ParityAutomaton, positional: Mapping
) -> SkeletonStrategy:
    """Forget the game pairing: a positional strategy on the product becomes
    a next-move function on (arena state, memory state)."""
    nxt = {}
    for (s, m), edge in positional.items():
        nxt[(s, m)] = (s, edge[1], edge[2][0])
    return SkeletonStrategy(skeleton=aut.skeleton, nxt=nxt)


@dataclass(frozen=True)
class StrategyReport:
    passed: bool
    region_size: int
    witness: Optional[dict] = None


def verify_strategy(
    arena: Arena,
    aut: ParityAutomaton,
    strat: SkeletonStrategy,
    player: int,
) -> StrategyReport:
    """Optimality check: fix the strategy, give the opponent everything.

    The product game is restricted to the strategy's edges on the player's
    states inside the player's winning region; the opponent must then win
    nowhere inside that region.  A failure yields a witness lasso re-checkable
    against the condition.
    """
    if player not in (1, 2):
        raise InputError("player must be 1 or 2")
    game = product_game(arena, aut)
    full = solve_parity(game)
    region = full.regions[player]
    opponent = 3 - player

    sk = aut.skeleton
    restricted_edges = []
    for e in game.edges:
        (s, m), c, _, _ = e
        if game.owner[(s, m)] == player and (s, m) in region:
            chosen = strat.nxt.get((s, m))
            if chosen is None:
                return StrategyReport(
                    passed=False,
                    region_size=len(region),
                    witness={"undefined_at": [s, m]},
                )
            if (s, c, e[2][0]) != tuple(chosen):
                continue
        restricted_edges.append(e)
    restricted = ParityGame.make(game.states, game.owner, restricted_edges)
    res = solve_parity(restricted)
    offenders = sorted(res.regions[opponent] & region, key=_gstate_key)
    if not offenders:
        return StrategyReport(passed=True, region_size=len(region))

    start = offenders[0]
    choice = dict(res.strategy[opponent])
    walk_state = start
    seen: dict = {}
    colors: list[Color] = []
    while walk_state not in seen:
        seen[walk_state] = len(colors)
        e = choice.get(walk_state)
        if e is None:
            outs = restricted.out_edges_map[walk_state]
            e = min(outs, key=_gedge_key)
        colors.append(e[1])
        walk_state = e[2]
    cut = seen[walk_state]
    witness = {
        "state": [start[0], start[1]],
        "prefix": colors[:cut],
        "period": colors[cut:],
    }
    return StrategyReport(passed=False, region_size=len(region), witness=witness)


# ---------------------------------------------------------------------------
# arena generators for the negative examples
# ---------------------------------------------------------------------------


def _chain(edges: list, namer, src: State, word: Sequence[Color], dst: State):
    """Edges spelling ``word`` from src to dst through fresh states."""
    cur = src
    for i, c in enumerate(word):
        nxt = dst if i == len(word) - 1 else namer()
        edges.append((cur, c, nxt))
        cur = nxt


def _lasso_tail(edges: list, namer, src: State, lasso: Lasso):
    """Edges spelling ``prefix . period^omega`` from src; cycle on fresh states."""
    cur = src
    for c in lasso.prefix:
        nxt = namer()
        edges.append((cur, c, nxt))
        cur = nxt
    first = namer()
    edges.append((cur, lasso.period[0], first))
    cyc = first
    for c in lasso.period[1:]:
        nxt = namer()
        edges.append((cyc, c, nxt))
        cyc = nxt
    edges.append((cyc, lasso.period[0], first))


def _namer(prefix: str):
    counter = itertools.count()
    return lambda: f"{prefix}{next(counter)}"


def counterexample_arena(kind: str, **params) -> Arena:
    """Finite renderings of the one-player arenas refuting memory bounds.

    ``choice-loop``: a prefix chain into a loop state offering one returning
    chain per family word (family must be non-empty words).

    ``merged-chains``: two prefix chains merging into one state, from which
    two ultimately periodic suffixes depart as exact lassos.

    ``gap-branches``: a first-player choice among prefix chains into a
    second-player state answering with ultimately periodic responses.
    """
    if kind == "choice-loop":
        w: Sequence[Color] = params.get("w", ())
        family: Sequence[Sequence[Color]] = params.get("family", ())
        player: int = params.get("player", 2)
        if not family:
            raise InputError("choice-loop needs a non-empty family")
        if any(len(v) == 0 for v in family):
            raise InputError("family words must be non-empty")
        fresh = _namer("t")
        edges: list[Edge] = []
        loop = "loop"
        for v in family:
            _chain(edges, fresh, loop, v, loop)
        if w:
            # empty prefix collapses the entry state into the loop state
            _chain(edges, fresh, "start", w, loop)
        states = {s for e in edges for s in (e[0], e[2])}
        return Arena.make(states, {s: player for s in states}, edges)

    if kind == "merged-chains":
        w1 = params["w1"]
        w2 = params["w2"]
        s1: Lasso = params["suffix1"]
        s2: Lasso = params["suffix2"]
        if len(w1) == 0 or len(w2) == 0:
            raise InputError("merged-chains needs non-empty prefix words")
        edges: list[Edge] = []
        _chain(edges, _namer("a"), "start1", w1, "merge")
        _chain(edges, _namer("b"), "start2", w2, "merge")
        _lasso_tail(edges, _namer("u"), "merge", s1)
        _lasso_tail(edges, _namer("v"), "merge", s2)
        states = {s for e in edges for s in (e[0], e[2])}
        return Arena.make(states, {s: 1 for s in states}, edges)

    if kind == "gap-branches":
        branches: Sequence[Sequence[Color]] = params["branches"]
        responses: Sequence[Lasso] = params["responses"]
        depth: Optional[int] = params.get("depth")
        if depth is not None:
            if depth < 1 or depth > len(branches):
                raise InputError("depth must select at least one branch")
            branches = branches[:depth]
        if not branches or not responses:
            raise InputError("gap-branches needs branches and responses")
        if any(len(b) == 0 for b in branches):
            raise InputError("branch words must be non-empty")
        edges: list[Edge] = []
        for i, b in enumerate(branches):
            _chain(edges, _namer(f"b{i}_"), "choose", b, "answer")
        for i, r in enumerate(responses):
            _lasso_tail(edges, _namer(f"r{i}_"), "answer", r)
        states = {s for e in edges for s in (e[0], e[2])}
        owner = {s: 2 if s == "answer" or s.startswith("r") else 1 for s in states}
        return Arena.make(states, owner, edges)

    raise InputError(f"unknown arena kind {kind!r}")


# ---------------------------------------------------------------------------
# randomized lift experiment
# ---------------------------------------------------------------------------


def random_arena(rng: random.Random, max_states: int, alphabet: Sequence[Color]) -> Arena:
    """Uniform owners, out-degree 1-3, colors and targets uniform."""
    n = rng.randint(1, max_states)
    states = [f"s{i}" for i in range(n)]
    owner = {s: rng.choice((1, 2)) for s in states}
    edges = set()
    for s in states:
        degree = rng.randint(1, 3)
        first = (s, rng.choice(alphabet), rng.choice(states))
        edges.add(first)
        for _ in range(degree - 1):
            edges.add((s, rng.choice(alphabet), rng.choice(states)))
    return Arena.make(states, owner, edges)


@dataclass(frozen=True, eq=False)
class LiftReport:
    arenas: int
    checks: int
    passes: int
    failures: tuple
    seed: int

    @property
    def all_passed(self) -> bool:
        return not self.failures


def lift_experiment(
    cond: Condition,
    m: Skeleton,
    n_arenas: int,
    max_states: int,
    seed: int = 0,
    samples: int = 200,
) -> LiftReport:
    """Synthesize once, then watch projected strategies win random games.

    For each random two-player arena, the product game with the synthesized
    automaton is solved, both players' positional strategies are projected
    onto the memory skeleton, and each projection is verified optimal.
    """
    from .synthesis import synthesize

    result = synthesize(cond, m, samples=samples, seed=seed, allow_transient=True)
    aut = result.automaton
    alphabet = aut.skeleton.alphabet
    failures = []
    checks = 0
    for i in range(n_arenas):
        rng = random.Random(f"{seed}:{i}")
        arena = random_arena(rng, max_states, alphabet)
        game = product_game(arena, aut)
        solution = solve_parity(game)
        for player in (1, 2):
            checks += 1
            strat = strategy_project(arena, aut, solution.strategy[player])
            report = verify_strategy(arena, aut, strat, player)
            if not report.passed:
                failures.append({"arena_index": i, "player": player, "witness": report.witness})
    return LiftReport(
        arenas=n_arenas,
        checks=checks,
        passes=checks - len(failures),
        failures=tuple(failures),
        seed=seed,
    )
