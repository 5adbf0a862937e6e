"""Commonsense knowledge snapshots: triples, senses, relevance filtering.

Triple files are TSV with 3 or 4 columns (subject, relation, object[, weight]).
Sense files are TSV: word, sense id, gloss terms, domain tags (the last two
space-separated).  A triple token may carry a sense, as in ``tree#plant``;
:func:`apply_senses` keeps only the triples about the sense chosen for the
current context.
"""
from __future__ import annotations

import csv
import io
import os
import re
import warnings
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .defaults import DefaultSpec, compile_all
from .parser import Query, parse_program
from .terms import Atom, Constant, Literal, Program, Variable, subterms

RELATIONS = ("isa", "part_of", "synonym", "has_property", "instance_of")
_TOKEN_RE = re.compile(r"[a-z][a-z0-9_]*(#[a-z0-9_]+)?\Z")

STOP_WORDS = frozenset("""
a an the of in on at to for from by with and or but not no is are was were be been being
what which who whom whose when where why how this that these those it its they them their
he she his her we our you your i me my do does did has have had will would can could should
shall may might must there here than then so as if into out up down over under about
""".split())


class KBError(ValueError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(self.diagnostics))


class KBWarning(UserWarning):
    pass


@dataclass(frozen=True, order=True)
class ConceptTriple:
    subject: str
    relation: str
    object: str
    weight: float = 1.0


@dataclass(frozen=True)
class SenseEntry:
    word: str
    sense_id: str
    gloss_terms: tuple
    domain_tags: frozenset = frozenset()


@dataclass(frozen=True)
class ContextProfile:
    terms: Counter = field(default_factory=Counter)

    @classmethod
    def from_tokens(cls, tokens: Iterable[str]) -> "ContextProfile":
        c = Counter()
        for t in tokens:
            for part in re.split(r"[^a-z0-9]+", str(t).lower()):
                if part and part not in STOP_WORDS:
                    c[part] += 1
        return cls(c)

    @classmethod
    def from_program(cls, p: Program, q: Optional[Query] = None) -> "ContextProfile":
        """Harvest constants from passage facts and the question."""
        toks = []
        lits = []
        for r in p.rules:
            if r.head is not None:
                lits.append(r.head)
            lits.extend(b.literal for b in r.body)
        if q is not None:
            lits.extend(b.literal for b in q.body)
        for l in lits:
            for a in l.atom.args:
                toks.extend(t.name for t in subterms(a) if isinstance(t, Constant))
        return cls.from_tokens(toks)

    def __add__(self, other: "ContextProfile") -> "ContextProfile":
        return ContextProfile(self.terms + other.terms)

    def count(self, term: str) -> int:
        """Occurrences of ``term``; multi-word terms like ``computer_science``
        count as the rarest of their parts when not present verbatim."""
        if self.terms.get(term):
            return self.terms[term]
        parts = [p for p in term.split("_") if p]
        if len(parts) < 2:
            return 0
        return min(self.terms.get(p, 0) for p in parts)


# -- loading ----------------------------------------------------------------

def _rows(source):
    if hasattr(source, "read"):
        text = source.read()
    elif isinstance(source, os.PathLike) or (
            isinstance(source, str) and "\n" not in source and "\t" not in source):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = str(source)
    return list(csv.reader(io.StringIO(text), delimiter="\t", quoting=csv.QUOTE_NONE))


def parse_triples(text: str) -> list[ConceptTriple]:
    return load_triples(io.StringIO(text))


def load_triples(source) -> list[ConceptTriple]:
    """Read a triple TSV (path, file object or text); duplicates keep the max weight."""
    diags = []
    best: dict = {}
    for lineno, row in enumerate(_rows(source), 1):
        row = [c.strip() for c in row]
        if not row or not any(row) or row[0].startswith("#"):
            continue
        if len(row) not in (3, 4):
            diags.append(f"line {lineno}: expected 3 or 4 tab-separated columns, got {len(row)}")
            continue
        s, rel, o = row[:3]
        if rel not in RELATIONS:
            diags.append(f"line {lineno}: unknown relation {rel!r} (expected one of {', '.join(RELATIONS)})")
            continue
        bad = [t for t in (s, o) if not _TOKEN_RE.match(t)]
        if bad:
            diags.append(f"line {lineno}: tokens must be non-empty lowercase identifiers: {bad}")
            continue
        w = 1.0
        if len(row) == 4:
            try:
                w = float(row[3])
            except ValueError:
                diags.append(f"line {lineno}: weight {row[3]!r} is not a number")
                continue
            if w < 0:
                diags.append(f"line {lineno}: weight must be non-negative")
                continue
        key = (s, rel, o)
        best[key] = max(best.get(key, w), w)
    if diags:
        raise KBError(diags)
    return [ConceptTriple(s, r, o, w) for (s, r, o), w in best.items()]


def load_senses(source) -> dict[str, list[SenseEntry]]:
    diags = []
    index: dict = {}
    ids = set()
    for lineno, row in enumerate(_rows(source), 1):
        if not row or not any(c.strip() for c in row) or row[0].startswith("#"):
            continue
        if len(row) not in (3, 4):
            diags.append(f"line {lineno}: expected 3 or 4 tab-separated columns, got {len(row)}")
            continue
        word, sid, gloss = row[0].strip(), row[1].strip(), row[2].split()
        tags = frozenset(row[3].split()) if len(row) == 4 else frozenset()
        if sid in ids:
            diags.append(f"line {lineno}: duplicate sense id {sid}")
            continue
        if not gloss:
            diags.append(f"line {lineno}: sense {sid} has no gloss terms")
            continue
        ids.add(sid)
        index.setdefault(word, []).append(SenseEntry(word, sid, tuple(gloss), tags))
    if diags:
        raise KBError(diags)
    return index


# -- word sense disambiguation ------------------------------------------------

def sense_score(sense: SenseEntry, ctx: ContextProfile, domain_bonus: int = 2) -> int:
    gloss = sum(ctx.count(g) for g in set(sense.gloss_terms))
    domain = sum(ctx.count(t) for t in sense.domain_tags)
    return gloss + domain_bonus * domain


def disambiguate(word: str, senses, ctx: ContextProfile, domain_bonus: int = 2) -> tuple[str, int]:
    """Pick the sense with the largest gloss/domain overlap with the context.

    ``senses`` is a list of entries or a whole sense index.  Ties go to the
    lexicographically smallest sense id.
    """
    if isinstance(senses, dict):
        senses = senses.get(word, [])
    senses = [s for s in senses if s.word == word]
    if not senses:
        raise KBError([f"no senses for word {word!r}"])
    scored = sorted(((-sense_score(s, ctx, domain_bonus), s.sense_id) for s in senses))
    neg, sid = scored[0]
    return sid, -neg


def apply_senses(triples: Iterable[ConceptTriple], index: dict, ctx: ContextProfile,
                 domain_bonus: int = 2) -> list[ConceptTriple]:
    """Resolve ``word#sense`` tokens: keep the context's sense, drop the others."""
    chosen: dict = {}

    def resolve(tok):
        if "#" not in tok:
            return tok
        word = tok.split("#", 1)[0]
        if word not in chosen:
            chosen[word] = disambiguate(word, index, ctx, domain_bonus)[0] if word in index else None
        if chosen[word] is None or chosen[word] == tok:
            return word
        return None

    out = []
    for t in triples:
        s, o = resolve(t.subject), resolve(t.object)
        if s is not None and o is not None:
            out.append(ConceptTriple(s, t.relation, o, t.weight))
    return out


# -- compiling ----------------------------------------------------------------

def relevant(triples: list[ConceptTriple], ctx: ContextProfile, hops: int = 2) -> list[ConceptTriple]:
    """Triples reachable within ``hops`` edges of a context term."""
    if hops < 1:
        raise ValueError("hops must be >= 1")
    adj: dict = {}
    for t in triples:
        adj.setdefault(t.subject, set()).add(t.object)
        adj.setdefault(t.object, set()).add(t.subject)
    dist = {}
    todo = deque()
    for term in ctx.terms:
        if term in adj and term not in dist:
            dist[term] = 0
            todo.append(term)
    while todo:
        n = todo.popleft()
        if dist[n] >= hops - 1:
            continue
        for m in sorted(adj[n]):
            if m not in dist:
                dist[m] = dist[n] + 1
                todo.append(m)
    return [t for t in triples if t.subject in dist or t.object in dist]


def isa_cycles(triples: Iterable[ConceptTriple]) -> list[list[str]]:
    succ: dict = {}
    for t in triples:
        if t.relation == "isa":
            succ.setdefault(t.subject, []).append(t.object)
    cycles, state = [], {}

    def visit(n, path):
        state[n] = 1
        path.append(n)
        for m in succ.get(n, ()):
            if state.get(m) == 1:
                cycles.append(path[path.index(m):] + [m])
            elif m not in state:
                visit(m, path)
        path.pop()
        state[n] = 2

    for n in sorted(succ):
        if n not in state:
            visit(n, [])
    return cycles


_CLOSURE_RULES = """
isa(X, Z) :- isa(X, Y), isa(Y, Z).
isa(X, C) :- instance_of(X, C).
part_of(X, Z) :- part_of(X, Y), part_of(Y, Z).
synonym(X, Y) :- synonym(Y, X).
event(P, X) :- holds(X, P).
"""


def property_default(cls: str, prop: str) -> DefaultSpec:
    """"Members of ``cls`` normally have ``prop``", over reified ``holds/2``."""
    return DefaultSpec(f"inh_{cls}_{prop}", Atom("isa", (Variable("X"), Constant(cls))),
                       Literal(Atom("holds", (Variable("X"), Constant(prop)))))


@dataclass
class CompiledKB:
    facts: Program
    defaults: list
    triples: list

    @property
    def program(self) -> Program:
        return self.facts.extend(compile_all(self.defaults), "default-layer")


def compile_kb(triples: Iterable[ConceptTriple], ctx: ContextProfile, hops: int = 2) -> CompiledKB:
    """Facts, closure rules and inheritance defaults for the relevant triples."""
    kept = relevant(sorted(set(triples)), ctx, hops)
    for cyc in isa_cycles(kept):
        warnings.warn(f"isa cycle kept: {' -> '.join(cyc)}", KBWarning, stacklevel=2)
    if not kept:
        return CompiledKB(Program(), [], [])
    facts, specs = [], {}
    for t in kept:
        if t.relation == "has_property":
            facts.append(f"holds_class({t.subject}, {t.object}).")
            d = property_default(t.subject, t.object)
            specs.setdefault(d.name, d)
        else:
            facts.append(f"{t.relation}({t.subject}, {t.object}).")
    prog = parse_program("\n".join(facts), source="kb")
    prog = prog.extend(parse_program(_CLOSURE_RULES).rules, "kb-closure")
    return CompiledKB(prog, list(specs.values()), kept)
