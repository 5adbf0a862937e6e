"""Defaults, exceptions and preferences compiled to abnormality rules.

A default ``d`` ("normally members of C have P") becomes::

    p(X) :- c(X), not ab(d(X)), not -p(X).

a weak exception ``e`` becomes ``ab(d(X)) :- c(X), not -e(X).`` and a strong
exception becomes ``-p(X) :- c(X), e(X).``  The ``c(X)`` conjunct in the two
exception rules is a domain guard: without it the rules are unsafe to ground
and leave ``X`` unbound under ``not`` during top-down evaluation.

Preferences disable the dispreferred default wherever the preferred one
applies: ``ab(d_over(X)) :- c_preferred(X).``

The ``.defaults`` file format, one declaration per line, ``%`` comments::

    default d1: bird(X) ~> flies(X).
    default d2: penguin(X) ~> -flies(X).
    default d3: bird(X), alive(X) ~> flies(X).     % second body literal is the guard
    weak d1: sick(X).
    strong d1: penguin(X).
    prefer d2 over d1.
    prefer d2 over d1 if healthy(X).
"""
from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .parser import ParseError, parse_body, parse_literal
from .terms import (
    Atom,
    BodyLiteral,
    Compound,
    Literal,
    Program,
    Rule,
    Variable,
    complement,
    variables,
)

X = Variable("X")
PROVENANCE = "default-layer"


class DefaultsError(ValueError):
    pass


class DefaultsWarning(UserWarning):
    pass


@dataclass(frozen=True)
class DefaultSpec:
    name: str
    class_atom: Atom
    property: Literal
    weak_exceptions: tuple = ()
    strong_exceptions: tuple = ()
    guard: Optional[BodyLiteral] = None

    def __post_init__(self):
        object.__setattr__(self, "weak_exceptions", tuple(self.weak_exceptions))
        object.__setattr__(self, "strong_exceptions", tuple(self.strong_exceptions))
        if not re.match(r"[a-z][A-Za-z0-9_]*\Z", self.name):
            raise DefaultsError(f"default name must be a lowercase identifier: {self.name!r}")
        templates = [Literal(self.class_atom), self.property, *self.weak_exceptions,
                     *self.strong_exceptions]
        if self.guard is not None:
            templates.append(self.guard.literal)
        for t in templates:
            vs = variables(t)
            if vs != [X]:
                raise DefaultsError(
                    f"default {self.name}: template {t} must use exactly the variable X")
        for e in self.strong_exceptions:
            if e.atom == self.property.atom:
                raise DefaultsError(
                    f"default {self.name}: strong exception {e} would derive both "
                    f"{self.property} and {complement(self.property)}")

    @classmethod
    def simple(cls, name: str, class_pred: str, prop: str, weak=(), strong=()) -> "DefaultSpec":
        """Build from text: ``DefaultSpec.simple("d1", "bird", "flies(X)")``."""
        return cls(name, Atom(class_pred, (X,)), parse_literal(prop),
                   tuple(parse_literal(w) for w in weak),
                   tuple(parse_literal(s) for s in strong))

    @property
    def ab_atom(self) -> Atom:
        return Atom("ab", (Compound(self.name, (X,)),))

    def with_exceptions(self, weak=(), strong=()) -> "DefaultSpec":
        return DefaultSpec(self.name, self.class_atom, self.property,
                           self.weak_exceptions + tuple(weak),
                           self.strong_exceptions + tuple(strong), self.guard)


@dataclass(frozen=True)
class PreferenceSpec:
    preferred: str
    over: str
    condition: Optional[Literal] = None

    def __post_init__(self):
        if self.preferred == self.over:
            raise DefaultsError(f"a default cannot be preferred over itself: {self.preferred}")


def compile_default(d: DefaultSpec) -> list[Rule]:
    c = BodyLiteral(Literal(d.class_atom))
    body = [c]
    if d.guard is not None:
        body.append(d.guard)
    body += [BodyLiteral(Literal(d.ab_atom), True), BodyLiteral(complement(d.property), True)]
    rules = [Rule(d.property, tuple(body))]
    for e in d.weak_exceptions:
        rules.append(Rule(Literal(d.ab_atom), (c, BodyLiteral(complement(e), True))))
    for e in d.strong_exceptions:
        rules.append(Rule(complement(d.property), (c, BodyLiteral(e))))
    return rules


def _can_conflict(a: Literal, b: Literal) -> bool:
    if a.atom.signature != b.atom.signature:
        return False
    # opposite conclusions on the same atom, or competing values of one predicate
    return a.negated != b.negated or a.atom != b.atom


def compile_preference(pref: PreferenceSpec, kb: Iterable[DefaultSpec]) -> list[Rule]:
    by_name = {d.name: d for d in kb}
    for n in (pref.preferred, pref.over):
        if n not in by_name:
            raise DefaultsError(f"preference mentions undeclared default {n}")
    hi, lo = by_name[pref.preferred], by_name[pref.over]
    if not _can_conflict(hi.property, lo.property):
        raise DefaultsError(
            f"preference {hi.name} over {lo.name} is vacuous: "
            f"{hi.property} and {lo.property} cannot conflict")
    body = [BodyLiteral(Literal(hi.class_atom))]
    if pref.condition is not None:
        if variables(pref.condition) != [X]:
            raise DefaultsError(f"preference condition {pref.condition} must use exactly X")
        body.append(BodyLiteral(pref.condition))
    return [Rule(Literal(lo.ab_atom), tuple(body))]


def compile_all(defaults: Iterable[DefaultSpec], preferences: Iterable[PreferenceSpec] = ()) -> list[Rule]:
    defaults = list(defaults)
    seen = set()
    for d in defaults:
        if d.name in seen:
            raise DefaultsError(f"duplicate default name {d.name}")
        seen.add(d.name)
    rules = []
    for d in defaults:
        rules.extend(compile_default(d))
    for pref in preferences:
        rules.extend(compile_preference(pref, defaults))
    return rules


def augment(p: Program, defaults: Iterable[DefaultSpec] = (),
            preferences: Iterable[PreferenceSpec] = ()) -> Program:
    """Append the compiled default layer to ``p`` (which is left untouched)."""
    defaults = list(defaults)
    preferences = list(preferences)
    rules = compile_all(defaults, preferences)
    if not rules:
        return p
    facts = {r.head for r in p.rules if r.is_fact}
    for d in defaults:
        if d.strong_exceptions:
            clash = sorted(str(f) for f in facts
                           if f.atom.signature == d.property.atom.signature
                           and f.negated == d.property.negated)
            if clash:
                warnings.warn(
                    f"default {d.name}: facts {', '.join(clash)} may contradict its strong "
                    f"exception(s), which derive {complement(d.property)}",
                    DefaultsWarning, stacklevel=2)
    return p.extend(rules, PROVENANCE)


# -- the .defaults file format ------------------------------------------------

_DEFAULT_RE = re.compile(r"default\s+(\w+)\s*:\s*(.+?)\s*~>\s*(.+?)\s*\.\s*\Z")
_EXC_RE = re.compile(r"(weak|strong)\s+(\w+)\s*:\s*(.+?)\s*\.\s*\Z")
_PREF_RE = re.compile(r"prefer\s+(\w+)\s+over\s+(\w+)(?:\s+if\s+(.+?))?\s*\.\s*\Z")


@dataclass
class DefaultsFile:
    defaults: list
    preferences: list
    # exceptions naming defaults declared elsewhere (e.g. imported from a KB)
    external: list = field(default_factory=list)

    def merged_with(self, imported: Iterable[DefaultSpec], strict: bool = True) -> list[DefaultSpec]:
        """Imported defaults followed by this file's, with exceptions attached.

        With ``strict=False`` exceptions for defaults that were not imported
        (e.g. filtered out as irrelevant) are skipped instead of rejected.
        """
        specs = {}
        for d in list(imported) + self.defaults:
            if d.name in specs:
                raise DefaultsError(f"duplicate default name {d.name}")
            specs[d.name] = d
        for where, kind, name, e in self.external:
            if name not in specs:
                if not strict:
                    continue
                raise DefaultsError(f"{where}: exception for undeclared default {name}")
            d = specs[name]
            try:
                specs[name] = d.with_exceptions(weak=[e]) if kind == "weak" else d.with_exceptions(strong=[e])
            except DefaultsError as err:
                raise DefaultsError(f"{where}: {err}") from None
        return list(specs.values())

    def compile(self, imported: Iterable[DefaultSpec] = ()) -> list[Rule]:
        return compile_all(self.merged_with(imported), self.preferences)


def parse_defaults(text: str, source: str = "<string>") -> DefaultsFile:
    specs: dict = {}
    order: list = []
    prefs: list = []
    pending: list = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("%", 1)[0].strip()
        if not line:
            continue
        try:
            m = _DEFAULT_RE.match(line)
            if m:
                name, cls, prop = m.groups()
                body = parse_body(cls)
                if body[0].naf or body[0].literal.negated:
                    raise DefaultsError("the class literal must be a positive atom")
                if len(body) > 2:
                    raise DefaultsError("at most one guard literal is allowed")
                if name in specs:
                    raise DefaultsError(f"duplicate default name {name}")
                specs[name] = DefaultSpec(name, body[0].literal.atom, parse_literal(prop),
                                          guard=body[1] if len(body) == 2 else None)
                order.append(name)
                continue
            m = _EXC_RE.match(line)
            if m:
                pending.append((lineno, m.group(1), m.group(2), parse_literal(m.group(3))))
                continue
            m = _PREF_RE.match(line)
            if m:
                cond = parse_literal(m.group(3)) if m.group(3) else None
                prefs.append(PreferenceSpec(m.group(1), m.group(2), cond))
                continue
            raise DefaultsError("expected 'default', 'weak', 'strong' or 'prefer' declaration")
        except (DefaultsError, ParseError) as e:
            raise DefaultsError(f"{source}:{lineno}: {e}") from None
    external = []
    for lineno, kind, name, e in pending:
        if name not in specs:
            external.append((f"{source}:{lineno}", kind, name, e))
            continue
        d = specs[name]
        try:
            specs[name] = d.with_exceptions(weak=[e]) if kind == "weak" else d.with_exceptions(strong=[e])
        except DefaultsError as err:
            raise DefaultsError(f"{source}:{lineno}: {err}") from None
    return DefaultsFile([specs[n] for n in order], prefs, external)


def load_defaults(path) -> DefaultsFile:
    with open(path, encoding="utf-8") as fh:
        return parse_defaults(fh.read(), str(path))
