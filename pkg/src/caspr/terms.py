"""Symbolic data model for ASP programs: terms, atoms, literals, rules.

Everything here is an immutable value.  Substitutions are plain dicts
mapping :class:`Variable` to terms; :func:`unify` returns a resolved
(idempotent) most general unifier or ``None``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Union

_CONST_RE = re.compile(r"[a-z][A-Za-z0-9_]*\Z")
_VAR_RE = re.compile(r"[A-Z_][A-Za-z0-9_@]*\Z")


class TermError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Variable:
    name: str

    def __post_init__(self):
        if not _VAR_RE.match(self.name):
            raise TermError(f"variable name must start uppercase or '_': {self.name!r}")

    def __str__(self):
        return self.name


@dataclass(frozen=True, order=True)
class Constant:
    name: str

    def __post_init__(self):
        if not _CONST_RE.match(self.name):
            raise TermError(f"constant name must start lowercase: {self.name!r}")

    def __str__(self):
        return self.name


@dataclass(frozen=True, order=True)
class Integer:
    value: int

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True, order=True)
class Compound:
    functor: str
    args: tuple

    def __post_init__(self):
        if not _CONST_RE.match(self.functor):
            raise TermError(f"functor must start lowercase: {self.functor!r}")
        if not self.args:
            raise TermError("compound term needs at least one argument")
        object.__setattr__(self, "args", tuple(self.args))

    def __str__(self):
        return f"{self.functor}({', '.join(map(str, self.args))})"


Term = Union[Variable, Constant, Integer, Compound]


@dataclass(frozen=True, order=True)
class Atom:
    predicate: str
    args: tuple = ()

    def __post_init__(self):
        if not _CONST_RE.match(self.predicate):
            raise TermError(f"predicate must start lowercase: {self.predicate!r}")
        object.__setattr__(self, "args", tuple(self.args))

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def signature(self) -> tuple[str, int]:
        return (self.predicate, len(self.args))

    def is_ground(self) -> bool:
        return all(is_ground(a) for a in self.args)

    def __str__(self):
        if not self.args:
            return self.predicate
        return f"{self.predicate}({', '.join(map(str, self.args))})"


@dataclass(frozen=True, order=True)
class Literal:
    """An atom, optionally classically negated (written ``-p(X)``)."""

    atom: Atom
    negated: bool = False

    @property
    def key(self) -> tuple[str, int, bool]:
        """Predicate node for dependency analysis; ``-p`` is its own node."""
        return (self.atom.predicate, self.atom.arity, self.negated)

    def is_ground(self) -> bool:
        return self.atom.is_ground()

    def __str__(self):
        return ("-" if self.negated else "") + str(self.atom)


@dataclass(frozen=True, order=True)
class BodyLiteral:
    literal: Literal
    naf: bool = False

    def is_ground(self) -> bool:
        return self.literal.is_ground()

    def __str__(self):
        return ("not " if self.naf else "") + str(self.literal)


@dataclass(frozen=True)
class Rule:
    """``head :- body.``  A fact has an empty body; a constraint has no head."""

    head: Optional[Literal]
    body: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(self.body))
        if self.head is None and not self.body:
            raise TermError("a constraint needs a non-empty body")

    @property
    def is_fact(self) -> bool:
        return self.head is not None and not self.body

    @property
    def is_constraint(self) -> bool:
        return self.head is None

    def __str__(self):
        if self.head is None:
            return f":- {', '.join(map(str, self.body))}."
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(map(str, self.body))}."


@dataclass(frozen=True)
class Program:
    rules: tuple = ()
    provenance: tuple = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        prov = tuple(self.provenance)
        if len(prov) < len(self.rules):
            prov = prov + ("",) * (len(self.rules) - len(prov))
        object.__setattr__(self, "provenance", prov[: len(self.rules)])

    def __len__(self):
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def __add__(self, other: "Program") -> "Program":
        return Program(self.rules + other.rules, self.provenance + other.provenance)

    def extend(self, rules, provenance: str = "") -> "Program":
        rules = tuple(rules)
        return Program(self.rules + rules, self.provenance + (provenance,) * len(rules))

    def constants(self) -> list:
        """Constants and integers occurring anywhere, in first-seen order."""
        seen = {}
        for r in self.rules:
            for t in rule_terms(r):
                for sub in subterms(t):
                    if isinstance(sub, (Constant, Integer)):
                        seen.setdefault(sub, None)
        return list(seen)

    def functors(self) -> list[tuple[str, int]]:
        seen = {}
        for r in self.rules:
            for t in rule_terms(r):
                for sub in subterms(t):
                    if isinstance(sub, Compound):
                        seen.setdefault((sub.functor, len(sub.args)), None)
        return list(seen)

    def max_depth(self) -> int:
        return max((depth(t) for r in self.rules for t in rule_terms(r)), default=0)

    def __str__(self):
        return "\n".join(map(str, self.rules))


Substitution = dict


# -- term helpers -----------------------------------------------------------

def atom(predicate: str, *args) -> Atom:
    """Convenience constructor: strings become constants or variables by case."""
    return Atom(predicate, tuple(_coerce(a) for a in args))


def lit(predicate: str, *args, negated: bool = False) -> Literal:
    return Literal(atom(predicate, *args), negated)


def _coerce(x) -> Term:
    if isinstance(x, (Variable, Constant, Integer, Compound)):
        return x
    if isinstance(x, int):
        return Integer(x)
    if isinstance(x, str):
        return Variable(x) if x[:1].isupper() or x[:1] == "_" else Constant(x)
    raise TypeError(f"cannot make a term from {x!r}")


def is_ground(t) -> bool:
    if isinstance(t, Variable):
        return False
    if isinstance(t, Compound):
        return all(is_ground(a) for a in t.args)
    if isinstance(t, Atom):
        return t.is_ground()
    if isinstance(t, (Literal, BodyLiteral)):
        return t.is_ground()
    return True


def depth(t) -> int:
    """Functor nesting depth; constants have depth 0."""
    if isinstance(t, Compound):
        return 1 + max(depth(a) for a in t.args)
    if isinstance(t, Atom):
        return max((depth(a) for a in t.args), default=0)
    return 0


def subterms(t) -> Iterator:
    yield t
    if isinstance(t, Compound):
        for a in t.args:
            yield from subterms(a)


def rule_terms(r: Rule) -> Iterator:
    if r.head is not None:
        yield from r.head.atom.args
    for b in r.body:
        yield from b.literal.atom.args


def variables(x) -> list[Variable]:
    """Variables of a term/atom/literal/rule in left-to-right first-occurrence order."""
    out: dict = {}

    def walk(t):
        if isinstance(t, Variable):
            out.setdefault(t, None)
        elif isinstance(t, Compound):
            for a in t.args:
                walk(a)
        elif isinstance(t, Atom):
            for a in t.args:
                walk(a)
        elif isinstance(t, Literal):
            walk(t.atom)
        elif isinstance(t, BodyLiteral):
            walk(t.literal.atom)
        elif isinstance(t, Rule):
            if t.head is not None:
                walk(t.head)
            for b in t.body:
                walk(b)

    walk(x)
    return list(out)


def complement(l: Literal) -> Literal:
    return Literal(l.atom, not l.negated)


# -- substitution and unification ------------------------------------------

def walk(t, s: Mapping):
    while isinstance(t, Variable) and t in s:
        t = s[t]
    return t


def apply(s: Mapping, x):
    """Replace bound variables everywhere in ``x`` (chains are followed)."""
    if not s:
        return x
    if isinstance(x, Variable):
        t = walk(x, s)
        return t if isinstance(t, Variable) else apply(s, t)
    if isinstance(x, Compound):
        return Compound(x.functor, tuple(apply(s, a) for a in x.args))
    if isinstance(x, (Constant, Integer)):
        return x
    if isinstance(x, Atom):
        if not x.args:
            return x
        return Atom(x.predicate, tuple(apply(s, a) for a in x.args))
    if isinstance(x, Literal):
        return Literal(apply(s, x.atom), x.negated)
    if isinstance(x, BodyLiteral):
        return BodyLiteral(apply(s, x.literal), x.naf)
    if isinstance(x, Rule):
        head = None if x.head is None else apply(s, x.head)
        return Rule(head, tuple(apply(s, b) for b in x.body))
    raise TypeError(f"cannot apply a substitution to {type(x).__name__}")


def occurs(v: Variable, t, s: Mapping) -> bool:
    t = walk(t, s)
    if t == v:
        return True
    if isinstance(t, Compound):
        return any(occurs(v, a, s) for a in t.args)
    return False


def unify_into(a, b, s: dict) -> Optional[dict]:
    """Extend triangular substitution ``s`` so that ``a`` and ``b`` unify.

    Returns a new dict (``s`` is not modified) or ``None``.  Occurs check is on.
    """
    if isinstance(a, Literal) or isinstance(b, Literal):
        if not (isinstance(a, Literal) and isinstance(b, Literal)) or a.negated != b.negated:
            return None
        a, b = a.atom, b.atom
    if isinstance(a, Atom) or isinstance(b, Atom):
        if not (isinstance(a, Atom) and isinstance(b, Atom)) or a.signature != b.signature:
            return None
        pairs = list(zip(a.args, b.args))
    else:
        pairs = [(a, b)]
    s = dict(s)
    while pairs:
        x, y = pairs.pop()
        x, y = walk(x, s), walk(y, s)
        if x == y:
            continue
        if isinstance(x, Variable):
            if occurs(x, y, s):
                return None
            s[x] = y
        elif isinstance(y, Variable):
            if occurs(y, x, s):
                return None
            s[y] = x
        elif isinstance(x, Compound) and isinstance(y, Compound):
            if x.functor != y.functor or len(x.args) != len(y.args):
                return None
            pairs.extend(zip(x.args, y.args))
        else:
            return None
    return s


def resolve(s: Mapping) -> dict:
    """Turn a triangular substitution into an idempotent one."""
    return {v: apply(s, t) for v, t in s.items()}


def unify(a, b) -> Optional[dict]:
    """Most general unifier of two terms or atoms, or ``None``."""
    s = unify_into(a, b, {})
    return None if s is None else resolve(s)


def compose(s1: Mapping, s2: Mapping) -> dict:
    """``apply(compose(s1, s2), x) == apply(s2, apply(s1, x))``."""
    out = {v: apply(s2, t) for v, t in s1.items()}
    for v, t in s2.items():
        out.setdefault(v, t)
    return {v: t for v, t in out.items() if v != t}


def rename(r: Rule, suffix: str) -> Rule:
    vs = variables(r)
    if not vs:
        return r
    return apply({v: Variable(f"{v.name}@{suffix}") for v in vs}, r)
