"""JSON formats and DOT export for skeletons, automata, arenas, conditions.

Every document carries ``"format": 1`` and a ``"type"`` tag.  Serialization
is canonical (sorted keys, canonical row order, trailing newline) so emitted
files are byte-stable across runs.  DOT export follows the drawing
convention used throughout: rhombuses for skeleton states, circles for
states of player 1, boxes for states of player 2.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Mapping

from .conditions import (
    Condition,
    DiscountedSumCondition,
    DpaCondition,
    MeanPayoffCondition,
    MullerCondition,
    TotalPayoffCondition,
)
from .errors import InputError
from .games import Arena
from .skeletons import (
    Color,
    ParityAutomaton,
    Skeleton,
    sorted_support,
    support_key,
)

FORMAT = 1


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _color_out(c: Color):
    return c


def _color_in(c) -> Color:
    if isinstance(c, bool) or not isinstance(c, (int, str)):
        raise InputError(f"colors must be integers or strings, got {c!r}")
    return c


# -- skeletons and automata -------------------------------------------------


def skeleton_to_dict(sk: Skeleton) -> dict:
    return {
        "format": FORMAT,
        "type": "skeleton",
        "alphabet": [_color_out(c) for c in sk.alphabet],
        "states": list(sk.states),
        "init": sk.init,
        "upd": [[s, _color_out(c), t] for s, c, t in sk.transitions],
    }


def skeleton_from_dict(doc: Mapping) -> Skeleton:
    _expect(doc, "skeleton")
    upd = {}
    for row in doc["upd"]:
        if len(row) != 3:
            raise InputError(f"bad update row {row!r}")
        s, c, t = row
        upd[(s, _color_in(c))] = t
    return Skeleton.make(doc["states"], doc["init"], map(_color_in, doc["alphabet"]), upd)


def automaton_to_dict(aut: ParityAutomaton) -> dict:
    doc = skeleton_to_dict(aut.skeleton)
    doc["type"] = "parity-automaton"
    doc["priority"] = [[s, _color_out(c), p] for s, c, p in aut.priorities]
    return doc


def automaton_from_dict(doc: Mapping) -> ParityAutomaton:
    _expect(doc, "parity-automaton")
    sk = skeleton_from_dict({**doc, "type": "skeleton"})
    priority = {}
    for row in doc["priority"]:
        if len(row) != 3:
            raise InputError(f"bad priority row {row!r}")
        s, c, p = row
        priority[(s, _color_in(c))] = p
    return ParityAutomaton.make(sk, priority)


# -- arenas -------------------------------------------------------------------


def arena_to_dict(arena: Arena) -> dict:
    return {
        "format": FORMAT,
        "type": "arena",
        "states": list(arena.states),
        "owner": {s: p for s, p in arena.owners},
        "edges": [[s, _color_out(c), t] for s, c, t in arena.edges],
    }


def arena_from_dict(doc: Mapping) -> Arena:
    _expect(doc, "arena")
    edges = []
    for row in doc["edges"]:
        if len(row) != 3:
            raise InputError(f"bad edge row {row!r}")
        s, c, t = row
        edges.append((s, _color_in(c), t))
    return Arena.make(doc["states"], doc["owner"], edges)


# -- conditions ---------------------------------------------------------------


def fraction_to_pair(q: Fraction) -> list:
    return [q.numerator, q.denominator]


def fraction_from_pair(pair) -> Fraction:
    if not isinstance(pair, (list, tuple)) or len(pair) != 2:
        raise InputError(f"fractions are encoded as [numerator, denominator], got {pair!r}")
    return Fraction(pair[0], pair[1])


def condition_to_dict(cond: Condition) -> dict:
    base = {"format": FORMAT, "type": "condition"}
    if isinstance(cond, DpaCondition):
        return {**base, "kind": "dpa", "automaton": automaton_to_dict(cond.automaton)}
    if isinstance(cond, MullerCondition):
        if cond.winning_supports is None:
            raise InputError(
                "predicate-backed conditions have no canonical file form; "
                "tabulate the winning supports first"
            )
        table = sorted(cond.winning_supports, key=support_key)
        return {
            **base,
            "kind": "muller",
            "skeleton": skeleton_to_dict(cond.skeleton),
            "winning_supports": [
                [[s, _color_out(c)] for s, c in sorted_support(g)] for g in table
            ],
        }
    if isinstance(cond, DiscountedSumCondition):
        return {**base, "kind": "discounted-sum", "lambda": fraction_to_pair(cond.lam), "k": cond.k}
    if isinstance(cond, MeanPayoffCondition):
        return {**base, "kind": "mean-payoff"}
    if isinstance(cond, TotalPayoffCondition):
        return {**base, "kind": "total-payoff"}
    raise InputError(f"unknown condition type {type(cond).__name__}")


def condition_from_dict(doc: Mapping) -> Condition:
    _expect(doc, "condition")
    kind = doc.get("kind")
    if kind == "dpa":
        return DpaCondition(automaton_from_dict(doc["automaton"]))
    if kind == "muller":
        sk = skeleton_from_dict(doc["skeleton"])
        table = set()
        for rows in doc["winning_supports"]:
            g = frozenset((s, _color_in(c)) for s, c in rows)
            table.add(g)
        return MullerCondition(skeleton=sk, winning_supports=frozenset(table))
    if kind == "discounted-sum":
        return DiscountedSumCondition(fraction_from_pair(doc["lambda"]), doc["k"])
    if kind == "mean-payoff":
        return MeanPayoffCondition()
    if kind == "total-payoff":
        return TotalPayoffCondition()
    raise InputError(f"unknown condition kind {kind!r}")


def _expect(doc: Mapping, typ: str):
    if not isinstance(doc, Mapping):
        raise InputError("document must be a JSON object")
    if doc.get("format") != FORMAT:
        raise InputError(f"unsupported format {doc.get('format')!r}")
    if doc.get("type") != typ:
        raise InputError(f"expected a {typ} document, got {doc.get('type')!r}")


def load_document(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: not valid JSON ({exc})") from None
    loaders = {
        "skeleton": skeleton_from_dict,
        "parity-automaton": automaton_from_dict,
        "arena": arena_from_dict,
        "condition": condition_from_dict,
    }
    typ = doc.get("type") if isinstance(doc, dict) else None
    if typ not in loaders:
        raise InputError(f"{path}: unknown document type {typ!r}")
    return loaders[typ](doc)


def load_typed(path: str, expected: type):
    obj = load_document(path)
    if expected is Condition:
        ok = isinstance(
            obj,
            (
                DpaCondition,
                MullerCondition,
                DiscountedSumCondition,
                MeanPayoffCondition,
                TotalPayoffCondition,
            ),
        )
    else:
        ok = isinstance(obj, expected)
    if not ok:
        raise InputError(f"{path}: expected {getattr(expected, '__name__', expected)}")
    return obj


# -- DOT export ---------------------------------------------------------------


def _dot_id(name) -> str:
    return '"' + str(name).replace('"', '\\"') + '"'


def skeleton_to_dot(sk: Skeleton, priorities: Mapping | None = None) -> str:
    lines = ["digraph {", "  rankdir=LR;", "  node [shape=diamond];"]
    lines.append("  __init__ [shape=point, style=invis];")
    lines.append(f"  __init__ -> {_dot_id(sk.init)};")
    by_pair: dict = {}
    for s, c, t in sk.transitions:
        label = str(c)
        if priorities is not None:
            label += f" | {priorities[(s, c)]}"
        by_pair.setdefault((s, t), []).append(label)
    for (s, t), labels in sorted(by_pair.items()):
        lines.append(f"  {_dot_id(s)} -> {_dot_id(t)} [label=\"{', '.join(labels)}\"];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def automaton_to_dot(aut: ParityAutomaton) -> str:
    return skeleton_to_dot(aut.skeleton, priorities=aut._pri)


def arena_to_dot(arena: Arena) -> str:
    lines = ["digraph {", "  rankdir=LR;"]
    for s in arena.states:
        shape = "circle" if arena.owner[s] == 1 else "box"
        lines.append(f"  {_dot_id(s)} [shape={shape}];")
    by_pair: dict = {}
    for s, c, t in arena.edges:
        by_pair.setdefault((s, t), []).append(str(c))
    for (s, t), labels in sorted(by_pair.items()):
        lines.append(f"  {_dot_id(s)} -> {_dot_id(t)} [label=\"{', '.join(labels)}\"];")
    lines.append("}")
    return "\n".join(lines) + "\n"
