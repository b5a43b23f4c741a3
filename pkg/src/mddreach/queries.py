"""CTL base queries over atomic place predicates.

A query is ``EX p``, ``EU p q`` or ``EG p`` where each predicate is
``<place><cmp><nat>`` with cmp one of ``=  >=  <=``, or the literals
``true``/``false``.  Predicates denote level-local sets over the potential
space; operators are evaluated on the reachable universe.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .mdd import NodeRef, StateSet


class QueryError(ValueError):
    """Malformed query or unknown place name."""


@dataclass(frozen=True)
class AtomicPredicate:
    place: str
    op: str       # one of = >= <=
    value: int

    def holds(self, count):
        if self.op == "=":
            return count == self.value
        if self.op == ">=":
            return count >= self.value
        return count <= self.value


_PRED_RE = re.compile(r"([A-Za-z_]\w*)(>=|<=|=)(\d+)\Z")


def parse_predicate(token):
    """One predicate token: a comparison, or the true/false literals."""
    if token == "true":
        return True
    if token == "false":
        return False
    m = _PRED_RE.match(token)
    if not m:
        raise QueryError(f"bad predicate {token!r}; expected <place>(=|>=|<=)<nat>")
    return AtomicPredicate(m.group(1), m.group(2), int(m.group(3)))


def parse_query(text):
    """Parse 'EX p', 'EU p q' or 'EG p' into (operator, predicates...)."""
    tokens = text.split()
    if not tokens:
        raise QueryError("empty query")
    op = tokens[0].upper()
    if op in ("EX", "EG"):
        if len(tokens) != 2:
            raise QueryError(f"{op} takes exactly one predicate")
        return (op, parse_predicate(tokens[1]))
    if op == "EU":
        if len(tokens) != 3:
            raise QueryError("EU takes exactly two predicates")
        return (op, parse_predicate(tokens[1]), parse_predicate(tokens[2]))
    raise QueryError(f"unknown operator {tokens[0]!r}; use EX, EU or EG")


def predicate_set(engine, pred):
    """Denotation of a predicate over the current potential space."""
    forest = engine.forest
    if pred is True:
        return forest.full_set()
    if pred is False:
        return forest.empty_set()
    model = engine.model
    level = model.level_of.get(pred.place)
    if level is None:
        raise QueryError(f"unknown place {pred.place!r}")
    idx = 1
    for k in range(1, forest.levels + 1):
        n = forest.domains[k]
        if k == level:
            vec = [idx if pred.holds(i) else 0 for i in range(n)]
        else:
            vec = [idx] * n
        idx = forest._mk(k, vec)
        if idx == 0:
            return forest.empty_set()
    return StateSet(forest, NodeRef(forest.levels, idx))


def eval_query(engine, query, universe):
    """Evaluate a parsed query against a universe (usually the reachable set)."""
    op = query[0]
    a = predicate_set(engine, query[1])
    if op == "EX":
        return engine.ex(a, universe)
    if op == "EG":
        return engine.eg(a, universe)
    b = predicate_set(engine, query[2])
    return engine.eu(a, b, universe)
