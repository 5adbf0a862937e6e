"""Relation extraction from pre-parsed dependency triples.

Triples come from an external parser as TSV rows::

    sentence_id  head_token  head_lemma  head_pos  relation  dep_token  dep_lemma  dep_pos

``root`` rows use ``ROOT`` for the three head columns.  A ``.patterns`` file
maps dependency configurations to semantic relations, one pattern per line::

    gen_part: nmod_of(A:NOUN|PROPN, B) => part_of(A, B) unless isa(B, A).

Slots are variables (optionally POS-constrained), lemma constants, or ``_``.
Patterns with an ``unless`` clause are suppressed when the clause's relation
is emitted; they are decided after every pattern that can emit that relation.
"""
from __future__ import annotations

import csv
import io
import os
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Optional

from .parser import Query
from .terms import Atom, BodyLiteral, Constant, Literal, Program, Rule, Variable

LABELS = ("nsubj", "dobj", "nmod_of", "nmod_in", "amod", "cop", "case", "root", "wh", "prt")
KINDS = {"part_of": (2,), "isa": (2,), "property": (2,), "event": (2, 3), "location": (2,)}
ANSWER_VAR = Variable("X")
# how a wh-word with no other role enters the pattern table
_WH_ROLE = {"where": "nmod_in"}


class IngestError(ValueError):
    pass


@dataclass(frozen=True)
class Token:
    token: str
    lemma: str
    pos: str


@dataclass(frozen=True)
class DependencyTriple:
    sentence_id: str
    head: Token
    relation: str
    dependent: Token

    def __post_init__(self):
        if self.relation not in LABELS:
            raise IngestError(f"unknown dependency label {self.relation!r}")


@dataclass(frozen=True)
class SemanticRelation:
    kind: str
    args: tuple
    provenance: str = field(default="", compare=False)

    def to_atom(self) -> Atom:
        return Atom(self.kind, tuple(a if isinstance(a, Variable) else Constant(a) for a in self.args))

    def __str__(self):
        return str(self.to_atom())


@dataclass(frozen=True)
class Slot:
    var: Optional[str] = None
    pos: frozenset = frozenset()
    lemma: Optional[str] = None

    def __str__(self):
        if self.lemma is not None:
            return self.lemma
        if self.var is None:
            return "_"
        return self.var + (":" + "|".join(sorted(self.pos)) if self.pos else "")


@dataclass(frozen=True)
class PatternRule:
    id: str
    match: tuple  # of (label, Slot, Slot)
    emit: tuple  # (kind, var names)
    unless: Optional[tuple] = None

    def __post_init__(self):
        bound = {s.var for _, h, d in self.match for s in (h, d) if s.var}
        for kind, names in filter(None, (self.emit, self.unless)):
            if kind not in KINDS or len(names) not in KINDS[kind]:
                raise IngestError(f"pattern {self.id}: {kind}/{len(names)} is not a relation kind")
            missing = [n for n in names if n not in bound]
            if missing:
                raise IngestError(f"pattern {self.id}: variable(s) {', '.join(missing)} "
                                  f"are not bound by the match")

    def __str__(self):
        m = ", ".join(f"{lab}({h}, {d})" for lab, h, d in self.match)
        e = f"{self.emit[0]}({', '.join(self.emit[1])})"
        u = f" unless {self.unless[0]}({', '.join(self.unless[1])})" if self.unless else ""
        return f"{self.id}: {m} => {e}{u}."


# -- reading ------------------------------------------------------------------

def _text(source) -> str:
    if hasattr(source, "read"):
        return source.read()
    if isinstance(source, os.PathLike) or (isinstance(source, str) and "\n" not in source
                                            and "\t" not in source):
        with open(source, encoding="utf-8") as fh:
            return fh.read()
    return str(source)


def parse_triple_row(row: list, where: str = "") -> DependencyTriple:
    if len(row) != 8:
        raise IngestError(f"{where}expected 8 tab-separated columns, got {len(row)}")
    sid, ht, hl, hp, rel, dt, dl, dp = (c.strip() for c in row)
    if rel not in LABELS:
        raise IngestError(f"{where}unknown dependency label {rel!r}")
    return DependencyTriple(sid, Token(ht, hl.lower(), hp), rel, Token(dt, dl.lower(), dp))


def load_dependency_triples(source) -> list[DependencyTriple]:
    out = []
    rows = csv.reader(io.StringIO(_text(source)), delimiter="\t", quoting=csv.QUOTE_NONE)
    for lineno, row in enumerate(rows, 1):
        if not row or not "".join(row).strip() or row[0].startswith("#"):
            continue
        out.append(parse_triple_row(row, f"line {lineno}: "))
    return out


_PAT_RE = re.compile(r"(\w+)\s*:\s*(.+?)\s*=>\s*(.+?)(?:\s+unless\s+(.+?))?\s*\.\s*\Z")
_TMPL_RE = re.compile(r"(\w+)\s*\(\s*([^,()]+?)\s*,\s*([^,()]+?)\s*\)")
_REL_RE = re.compile(r"(\w+)\s*\(\s*([^()]*?)\s*\)\s*\Z")


def _slot(text: str, where: str) -> Slot:
    text = text.strip()
    if text == "_":
        return Slot()
    name, _, pos = text.partition(":")
    if name[:1].isupper():
        return Slot(name, frozenset(p for p in pos.split("|") if p))
    if pos:
        raise IngestError(f"{where}: POS constraints apply to variables only ({text})")
    return Slot(lemma=name.lower())


def _relation_template(text: str, where: str) -> tuple:
    m = _REL_RE.match(text)
    if not m:
        raise IngestError(f"{where}: malformed relation {text!r}")
    return (m.group(1), tuple(a.strip() for a in m.group(2).split(",")))


def parse_patterns(text: str, source: str = "<patterns>") -> list[PatternRule]:
    out, ids = [], set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("%", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{lineno}"
        m = _PAT_RE.match(line)
        if not m:
            raise IngestError(f"{where}: expected 'id: match => relation [unless relation].'")
        pid, match_text, emit_text, unless_text = m.groups()
        if pid in ids:
            raise IngestError(f"{where}: duplicate pattern id {pid}")
        ids.add(pid)
        tmpls = _TMPL_RE.findall(match_text)
        rebuilt = ", ".join(f"{a}({b}, {c})" for a, b, c in tmpls)
        if not tmpls or re.sub(r"\s+", "", rebuilt) != re.sub(r"\s+", "", match_text):
            raise IngestError(f"{where}: malformed match {match_text!r}")
        match = []
        for lab, h, d in tmpls:
            if lab not in LABELS:
                raise IngestError(f"{where}: unknown dependency label {lab!r}")
            match.append((lab, _slot(h, where), _slot(d, where)))
        emit = _relation_template(emit_text, where)
        unless = _relation_template(unless_text, where) if unless_text else None
        try:
            out.append(PatternRule(pid, tuple(match), emit, unless))
        except IngestError as e:
            raise IngestError(f"{where}: {e}") from None
    return out


def load_patterns(source=None) -> list[PatternRule]:
    """Read a ``.patterns`` file; with no argument, the shipped table."""
    if source is None:
        text = resources.files("caspr").joinpath("data/default.patterns").read_text("utf-8")
        return parse_patterns(text, "default.patterns")
    return parse_patterns(_text(source), str(source))


# -- extraction ----------------------------------------------------------------

def constant_name(lemma: str) -> str:
    s = re.sub(r"[^a-z0-9_]+", "_", lemma.lower()).strip("_")
    if not s:
        raise IngestError(f"lemma {lemma!r} has no usable characters")
    return s if s[0].isalpha() else "n_" + s


def _sentences(triples):
    order, groups = [], {}
    for t in triples:
        if t.sentence_id not in groups:
            order.append(t.sentence_id)
            groups[t.sentence_id] = []
        groups[t.sentence_id].append(t)
    return [(sid, groups[sid]) for sid in order]


def _normalized_lemmas(triples) -> dict:
    """Particle verbs: ``broke`` + ``down`` gives ``break_down``."""
    names = {}
    for t in triples:
        if t.relation == "prt":
            names.setdefault(t.head, [t.head.lemma]).append(t.dependent.lemma)
    return {tok: "_".join(parts) for tok, parts in names.items()}


def _slot_ok(slot: Slot, tok: Token, wild: Optional[Token]) -> bool:
    if slot.lemma is not None:
        return tok.lemma == slot.lemma
    if slot.pos and tok != wild and tok.pos not in slot.pos:
        return False
    return True


def _matches(pattern: PatternRule, triples, wild=None):
    """Yield (binding, used triples) for every way the match can be satisfied."""
    def rec(i, env, used):
        if i == len(pattern.match):
            yield env, used
            return
        lab, hs, ds = pattern.match[i]
        for t in triples:
            if t.relation != lab or t in used:
                continue
            if not (_slot_ok(hs, t.head, wild) and _slot_ok(ds, t.dependent, wild)):
                continue
            env2 = dict(env)
            ok = True
            for s, tok in ((hs, t.head), (ds, t.dependent)):
                if s.var is None:
                    continue
                if env2.setdefault(s.var, tok) != tok:
                    ok = False
            if ok:
                yield from rec(i + 1, env2, used + (t,))
    yield from rec(0, {}, ())


@dataclass
class Extraction:
    relations: list
    consumed: int
    total: int

    @property
    def coverage(self) -> float:
        return 100.0 * self.consumed / self.total if self.total else 100.0


def _extract(triples, patterns, wild: Optional[Token] = None) -> Extraction:
    triples = list(triples)
    names = _normalized_lemmas(triples)
    used_all = {t for t in triples if t.relation == "prt"}

    def value(tok):
        if wild is not None and tok == wild:
            return ANSWER_VAR
        return constant_name(names.get(tok, tok.lemma))

    def inst(tmpl, env):
        kind, vars_ = tmpl
        return SemanticRelation(kind, tuple(value(env[v]) for v in vars_))

    first, conditional = [], []
    for sid, sent in _sentences(triples):
        for pat in patterns:
            for env, used in _matches(pat, sent, wild):
                used_all.update(used)
                rel = inst(pat.emit, env)
                rel = SemanticRelation(rel.kind, rel.args, f"{sid}:{pat.id}")
                if pat.unless is None:
                    first.append(rel)
                else:
                    conditional.append((pat, rel, inst(pat.unless, env)))
    out = first + _decide(conditional, {(r.kind, r.args) for r in first})
    seen, uniq = set(), []
    for r in out:
        if (r.kind, r.args) not in seen:
            seen.add((r.kind, r.args))
            uniq.append(r)
    return Extraction(uniq, len(used_all), len(triples))


def _decide(conditional, known: set) -> list:
    """Keep conditional emissions whose ``unless`` relation is not derived.

    A pattern is decided only after every pattern that can emit its
    ``unless`` kind, so blockers are final when they are consulted.
    """
    pending = list(conditional)
    kept = []
    while pending:
        open_kinds = {pat.emit[0] for pat, _, _ in pending}
        ready = [c for c in pending if c[0].unless[0] not in open_kinds]
        if not ready:
            cyc = sorted({pat.id for pat, _, _ in pending})
            raise IngestError(f"patterns {', '.join(cyc)} block each other through 'unless'")
        for pat, rel, cond in ready:
            if (cond.kind, cond.args) not in known:
                kept.append(rel)
        known |= {(r.kind, r.args) for r in kept}
        pending = [c for c in pending if c not in ready]
    return kept


def extract_relations(triples: Iterable[DependencyTriple], patterns: list[PatternRule]) -> list[SemanticRelation]:
    return _extract(triples, patterns).relations


def coverage_report(triples, patterns) -> Extraction:
    return _extract(triples, patterns)


def relations_to_program(rels: Iterable[SemanticRelation]) -> Program:
    rules, prov, seen = [], [], set()
    for r in rels:
        a = r.to_atom()
        if a in seen:
            continue
        seen.add(a)
        rules.append(Rule(Literal(a)))
        prov.append(r.provenance)
    return Program(tuple(rules), tuple(prov))


def translate_question(triples: Iterable[DependencyTriple], patterns: Optional[list] = None) -> Query:
    """Turn a parsed question into a query; the wh-word becomes the variable ``X``."""
    triples = list(triples)
    patterns = load_patterns() if patterns is None else patterns
    wh = []
    for t in triples:
        if t.relation == "wh" and t.dependent not in wh:
            wh.append(t.dependent)
    if len(wh) > 1:
        raise IngestError("a question may have at most one wh-word, found: "
                          + ", ".join(t.token for t in wh))
    wild = wh[0] if wh else None
    rewritten = []
    for t in triples:
        if t.relation != "wh":
            rewritten.append(t)
            continue
        has_role = any(u.dependent == t.dependent and u.relation not in ("wh", "root")
                       for u in triples)
        if not has_role and t.head.pos != "ROOT":
            role = _WH_ROLE.get(t.dependent.lemma, "nsubj")
            rewritten.append(DependencyTriple(t.sentence_id, t.head, role, t.dependent))
    rels = _extract(rewritten, patterns, wild).relations
    if not rels:
        raise IngestError("no pattern matched the question")
    body = tuple(BodyLiteral(Literal(r.to_atom())) for r in rels)
    q = Query(body)
    if wild is not None and ANSWER_VAR not in q.free_variables:
        raise IngestError(f"the wh-word {wild.token!r} did not reach any query literal")
    return q


def ingest(triples_source, patterns_source=None) -> Program:
    return relations_to_program(extract_relations(load_dependency_triples(triples_source),
                                                  load_patterns(patterns_source)))
