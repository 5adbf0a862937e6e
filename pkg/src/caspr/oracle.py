"""Brute-force grounding and stable model enumeration.

This is the semantic reference: small programs are instantiated over their
Herbrand universe and every candidate answer set is tested against the
Gelfond-Lifschitz definition.  It is deliberately simple and deliberately
small-scale; the goal-directed solver is tested against it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .terms import (
    Compound,
    Constant,
    Literal,
    Program,
    Rule,
    apply,
    complement,
    depth,
    variables,
)

DEFAULT_CEILING = 10**6


class GroundingError(RuntimeError):
    """Program is unsafe or beyond the oracle's scale."""


class UnsafeRuleError(GroundingError):
    pass


class CeilingExceeded(GroundingError):
    pass


@dataclass(frozen=True)
class GroundProgram:
    rules: tuple
    base: frozenset
    instantiations: int = 0
    origins: tuple = ()  # index of the source rule for each ground rule

    def literals(self) -> set:
        """Every ground literal mentioned by a rule."""
        out = set()
        for r in self.rules:
            if r.head is not None:
                out.add(r.head)
            out.update(b.literal for b in r.body)
        return out


@dataclass(frozen=True, order=True)
class StableModel:
    literals: frozenset = field(compare=False)
    key: tuple = field(default=(), repr=False)

    def __post_init__(self):
        object.__setattr__(self, "literals", frozenset(self.literals))
        object.__setattr__(self, "key", tuple(sorted(str(l) for l in self.literals)))

    def __contains__(self, l: Literal) -> bool:
        return l in self.literals

    def __iter__(self):
        return iter(sorted(self.literals, key=str))

    def __len__(self):
        return len(self.literals)

    def __str__(self):
        return "{" + ", ".join(self.key) + "}"


def check_safety(r: Rule) -> None:
    positive = set()
    for b in r.body:
        if not b.naf:
            positive.update(variables(b.literal))
    unsafe = [v for v in variables(r) if v not in positive]
    if unsafe:
        names = ", ".join(v.name for v in unsafe)
        raise UnsafeRuleError(
            f"unsafe rule `{r}`: variable(s) {names} occur only in the head or under "
            f"'not'; add a positive domain guard such as c({unsafe[0].name}) to the body"
        )


def herbrand_universe(constants: list, functors: list, depth_bound: int) -> list:
    """All ground terms up to ``depth_bound`` nesting, shallow first."""
    if not constants:
        constants = [Constant("u")]
    universe = list(constants)
    for _ in range(depth_bound):
        new = []
        seen = set(universe)
        for name, arity in functors:
            for args in itertools.product(universe, repeat=arity):
                t = Compound(name, args)
                if t not in seen:
                    seen.add(t)
                    new.append(t)
        if not new:
            break
        universe.extend(new)
    return universe


def ground(p: Program, depth_bound: Optional[int] = None, ceiling: int = DEFAULT_CEILING,
           extra_constants: Iterable = ()) -> GroundProgram:
    """Instantiate every rule over the Herbrand universe.

    Variables range over all terms of nesting depth <= ``depth_bound``; an
    instance is kept only if every term in it stays within the bound.
    """
    if depth_bound is None:
        depth_bound = p.max_depth()
    if depth_bound < p.max_depth():
        raise GroundingError(
            f"depth bound {depth_bound} is below the program's term depth {p.max_depth()}")
    for r in p.rules:
        check_safety(r)
    consts = p.constants()
    for c in extra_constants:
        if c not in consts:
            consts.append(c)
    universe = herbrand_universe(consts, p.functors(), depth_bound)
    total = 0
    for r in p.rules:
        total += len(universe) ** len(variables(r))
    if total > ceiling:
        raise CeilingExceeded(
            f"grounding needs {total} instantiations, above the ceiling of {ceiling}")
    out, origins = [], []
    seen = set()
    for i, r in enumerate(p.rules):
        vs = variables(r)
        for combo in itertools.product(universe, repeat=len(vs)):
            g = apply(dict(zip(vs, combo)), r) if vs else r
            if _rule_depth(g) > depth_bound or g in seen:
                continue
            seen.add(g)
            out.append(g)
            origins.append(i)
    base = set()
    for r in out:
        if r.head is not None:
            base.add(r.head.atom)
        base.update(b.literal.atom for b in r.body)
    return GroundProgram(tuple(out), frozenset(base), total, tuple(origins))


def _rule_depth(r: Rule) -> int:
    ds = [depth(b.literal.atom) for b in r.body]
    if r.head is not None:
        ds.append(depth(r.head.atom))
    return max(ds, default=0)


def reduct(g: GroundProgram, candidate) -> GroundProgram:
    """Gelfond-Lifschitz reduct of ``g`` with respect to ``candidate``."""
    candidate = set(candidate)
    out = []
    for r in g.rules:
        if any(b.naf and b.literal in candidate for b in r.body):
            continue
        out.append(Rule(r.head, tuple(b for b in r.body if not b.naf)))
    return GroundProgram(tuple(out), g.base, g.instantiations)


def least_model(rules: Iterable[Rule]) -> set:
    """Least model of naf-free ground rules (constraints are ignored here)."""
    rules = [r for r in rules if r.head is not None]
    watch: dict = {}
    missing = []
    model: set = set()
    queue = []
    for i, r in enumerate(rules):
        pos = {b.literal for b in r.body if not b.naf}
        missing.append(len(pos))
        for l in pos:
            watch.setdefault(l, []).append(i)
        if not pos:
            queue.append(r.head)
    while queue:
        l = queue.pop()
        if l in model:
            continue
        model.add(l)
        for i in watch.get(l, ()):
            missing[i] -= 1
            if missing[i] == 0:
                queue.append(rules[i].head)
    return model


def _consistent(lits) -> bool:
    return not any(complement(l) in lits for l in lits if not l.negated)


def _simplify(g: GroundProgram) -> list:
    """Drop rules that can never fire and naf literals that are trivially true.

    A literal that heads no rule of the naf-stripped program can never be in
    an answer set, so rules needing it positively are dead and ``not L`` on it
    always holds.  Stable models are unchanged.
    """
    possible = least_model(Rule(r.head, tuple(b for b in r.body if not b.naf))
                           for r in g.rules if r.head is not None)
    out = []
    for r in g.rules:
        if any(not b.naf and b.literal not in possible for b in r.body):
            continue
        body = tuple(b for b in r.body if not (b.naf and b.literal not in possible))
        if r.head is None and not body:
            return None
        out.append(Rule(r.head, body))
    return out


def _models_of_ground(g: GroundProgram, ceiling: int) -> list[StableModel]:
    rules = _simplify(g)
    if rules is None:
        # a constraint whose body always holds
        return []
    naf_lits = sorted({b.literal for r in rules for b in r.body if b.naf}, key=str)
    if 2 ** len(naf_lits) > ceiling:
        raise CeilingExceeded(
            f"{len(naf_lits)} negated literals give 2^{len(naf_lits)} candidates, above the ceiling")
    found = []
    # A stable model M satisfies M = LM(P^M), and P^M depends only on which
    # naf literals are in M; so guessing that intersection covers every model.
    for bits in itertools.product((False, True), repeat=len(naf_lits)):
        guess = {l for l, b in zip(naf_lits, bits) if b}
        red = reduct(GroundProgram(tuple(rules), g.base), guess)
        m = least_model(red.rules)
        if {l for l in naf_lits if l in m} != guess:
            continue
        if not _consistent(m):
            continue
        if _violates_constraint(rules, m):
            continue
        found.append(StableModel(frozenset(m)))
    return sorted(found)


def _violates_constraint(rules, m) -> bool:
    for r in rules:
        if r.head is None and all((b.literal in m) != b.naf for b in r.body):
            return True
    return False


def stable_models(p: Program, depth_bound: Optional[int] = None,
                  ceiling: int = DEFAULT_CEILING, max_models: Optional[int] = None) -> list[StableModel]:
    """All stable models, sorted by their printed literals."""
    g = ground(p, depth_bound, ceiling)
    models = _models_of_ground(g, ceiling)
    return models if max_models is None else models[:max_models]


def models_of_ground(g: GroundProgram, ceiling: int = DEFAULT_CEILING) -> list[StableModel]:
    return _models_of_ground(g, ceiling)


def brave_entails(p: Program, l: Literal, depth_bound: Optional[int] = None,
                  ceiling: int = DEFAULT_CEILING) -> bool:
    return any(l in m for m in stable_models(p, depth_bound, ceiling))
