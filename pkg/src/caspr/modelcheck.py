"""Independent answer-set verification.

Shares nothing with the enumerator in :mod:`caspr.oracle` beyond the ground
rules themselves: the reduct and the least model are recomputed here by
naive iteration.
"""
from __future__ import annotations

from typing import Iterable


def body_holds(rule, model) -> bool:
    return all((b.literal in model) != b.naf for b in rule.body)


def is_consistent(model) -> bool:
    for l in model:
        for m in model:
            if l.atom == m.atom and l.negated != m.negated:
                return False
    return True


def satisfies(rules: Iterable, model) -> bool:
    for r in rules:
        if body_holds(r, model):
            if r.head is None or r.head not in model:
                return False
    return True


def naive_least_model(rules) -> frozenset:
    """Least model of a naf-free program by repeated full passes."""
    model: set = set()
    while True:
        new = {r.head for r in rules if all(b.literal in model for b in r.body)}
        if new <= model:
            return frozenset(model)
        model |= new


def gl_reduct(rules, model) -> list:
    out = []
    for r in rules:
        if r.head is None:
            continue
        if any(b.naf and b.literal in model for b in r.body):
            continue
        out.append(type(r)(r.head, tuple(b for b in r.body if not b.naf)))
    return out


def check_model(ground_rules, model) -> list[str]:
    """Return the list of violated conditions (empty means ``model`` is stable)."""
    model = frozenset(model)
    rules = list(ground_rules)
    problems = []
    if not is_consistent(model):
        problems.append("inconsistent: contains a literal and its complement")
    if not satisfies(rules, model):
        problems.append("some rule or constraint is violated")
    if naive_least_model(gl_reduct(rules, model)) != model:
        problems.append("not the least model of its reduct")
    return problems


def is_stable(ground_rules, model) -> bool:
    return not check_model(ground_rules, model)
