"""Goal-directed (top-down) evaluation of ASP queries.

Positive goals are resolved SLD-style against the rules in program order.
``not L`` is evaluated only once ``L`` is ground: it succeeds iff the
sub-query ``L`` finitely fails.  Loops are detected on the ancestor chain:

* a call that is a variant of an ancestor call with no ``not`` in between is
  a positive loop; it consumes the answers its ancestor has found so far and
  the ancestor re-runs until no new answers appear;
* a repeat that crosses a ``not`` boundary is a loop through negation; the
  top-down attempt is abandoned and the query is handed to the brute-force
  oracle on the relevant ground slice.

Answers are brave: a literal succeeds iff it belongs to some answer set.
Because an answer set must also exist globally, programs whose heads include
both ``p`` and ``-p`` get a conflict check, and programs with negative cycles
get their cyclic part checked by the oracle.
"""
from __future__ import annotations

import functools
import sys
import threading
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from . import oracle
from .parser import Query
from .terms import (
    Atom,
    BodyLiteral,
    Literal,
    Program,
    Variable,
    apply,
    is_ground,
    rename,
    unify_into,
    variables,
)


# -- public data ------------------------------------------------------------

@dataclass(frozen=True)
class SolverConfig:
    max_depth: int = 10_000
    max_answers: Optional[int] = None
    fallback: bool = True
    trace: bool = False
    ceiling: int = oracle.DEFAULT_CEILING

    def __post_init__(self):
        if self.max_depth <= 0:
            raise ValueError("max_depth must be positive")
        if self.max_answers is not None and self.max_answers <= 0:
            raise ValueError("max_answers must be positive (or None for unlimited)")
        if self.ceiling <= 0:
            raise ValueError("ceiling must be positive")


@dataclass(frozen=True)
class Justification:
    """Proof tree node.

    ``kind`` is one of ``fact``, ``classical-fact``, ``rule`` or ``naf``; a
    conjunctive query's proofs hang under a single ``query`` node.
    ``conclusion`` is a :class:`Literal`, or a :class:`BodyLiteral` for naf
    assumptions.  ``rule_id`` is the 1-based rule index in the program.
    """

    kind: str
    conclusion: Union[Literal, BodyLiteral]
    rule_id: Optional[int] = None
    children: tuple = ()

    def leaves(self) -> Iterator["Justification"]:
        if not self.children:
            yield self
        for c in self.children:
            yield from c.leaves()

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    def render(self, indent: int = 0) -> str:
        if self.kind == "naf":
            tag = "assumed"
        elif self.kind == "query":
            tag = "query"
        elif self.kind == "rule":
            tag = f"rule {self.rule_id}"
        else:
            tag = f"{self.kind} {self.rule_id}"
        lines = [f"{'  ' * indent}{self.conclusion}  [{tag}]"]
        lines.extend(c.render(indent + 1) for c in self.children)
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "conclusion": str(self.conclusion),
            "rule": self.rule_id,
            "children": [c.to_dict() for c in self.children],
        }


@dataclass(frozen=True)
class Answer:
    bindings: dict
    justification: Justification

    def render_bindings(self) -> str:
        if not self.bindings:
            return "true"
        return ", ".join(f"{v} = {t}" for v, t in self.bindings.items())


SUCCESS, FAILURE, FALLBACK, REJECTED = "success", "failure", "fallback", "rejected"


@dataclass
class SolveOutcome:
    status: str
    answers: list = field(default_factory=list)
    verdict: Optional[bool] = None
    slice_size: int = 0
    reason: str = ""
    model: Optional[oracle.StableModel] = None
    trace: list = field(default_factory=list)

    @property
    def succeeded(self) -> bool:
        return self.status == SUCCESS or (self.status == FALLBACK and bool(self.verdict))

    @property
    def rejected(self) -> bool:
        return self.status == REJECTED

    def render(self, justify: bool = False) -> str:
        if self.status == REJECTED:
            return f"rejected: {self.reason}"
        head = "yes" if self.succeeded else "no"
        lines = [head]
        if self.status == FALLBACK:
            lines[0] += f"  (oracle fallback, slice of {self.slice_size} ground rules: {self.reason})"
        elif self.reason:
            lines[0] += f"  ({self.reason})"
        for a in self.answers:
            lines.append(a.render_bindings())
            if justify:
                lines.append(a.justification.render(1))
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "succeeded": self.succeeded,
            "verdict": self.verdict,
            "slice_size": self.slice_size,
            "reason": self.reason,
            "answers": [
                {"bindings": {str(v): str(t) for v, t in a.bindings.items()},
                 "justification": a.justification.to_dict()}
                for a in self.answers
            ],
        }


class Rejected(Exception):
    def __init__(self, kind: str, detail: str):
        self.kind = kind
        self.detail = detail
        super().__init__(f"{kind}: {detail}")


class NegativeLoop(Exception):
    def __init__(self, literal: Literal):
        self.literal = literal
        super().__init__(f"loop through negation at {literal}")


# -- static analysis ---------------------------------------------------------

@dataclass(frozen=True)
class Analysis:
    stratified: bool
    conflicts: frozenset
    cyclic: frozenset
    deps: dict
    has_constraints: bool

    @property
    def needs_global_check(self) -> bool:
        return bool(self.conflicts) or not self.stratified

    def closure(self, seeds) -> set:
        out = set()
        todo = list(seeds)
        while todo:
            k = todo.pop()
            if k in out:
                continue
            out.add(k)
            todo.extend(b for b, _ in self.deps.get(k, ()))
        return out


def _sccs(nodes, succ) -> list:
    index, low, on, stack, out = {}, {}, set(), [], []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ.get(root, ())))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on.add(root)
        while work:
            v, it = work[-1]
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on.add(w)
                    work.append((w, iter(succ.get(w, ()))))
                    break
                if w in on:
                    low[v] = min(low[v], index[w])
            else:
                work.pop()
                if work:
                    low[work[-1][0]] = min(low[work[-1][0]], low[v])
                if low[v] == index[v]:
                    comp = set()
                    while True:
                        w = stack.pop()
                        on.discard(w)
                        comp.add(w)
                        if w == v:
                            break
                    out.append(comp)
    return out


@functools.lru_cache(maxsize=256)
def analyze(p: Program) -> Analysis:
    deps: dict = {}
    heads_by_sig: dict = {}
    nodes = {}
    for r in p.rules:
        for b in r.body:
            nodes.setdefault(b.literal.key, None)
        if r.head is None:
            continue
        k = r.head.key
        nodes.setdefault(k, None)
        heads_by_sig.setdefault(k[:2], set()).add(k[2])
        deps.setdefault(k, set()).update((b.literal.key, b.naf) for b in r.body)
    succ = {k: {b for b, _ in v} for k, v in deps.items()}
    comp_of = {}
    for comp in _sccs(list(nodes), succ):
        for k in comp:
            comp_of[k] = id(comp)
    cyclic = set()
    for h, edges in deps.items():
        for b, naf in edges:
            if naf and comp_of[h] == comp_of[b]:
                cid = comp_of[h]
                cyclic.update(k for k in nodes if comp_of[k] == cid)
    conflicts = frozenset(sig for sig, signs in heads_by_sig.items() if len(signs) == 2)
    return Analysis(
        stratified=not cyclic,
        conflicts=conflicts,
        cyclic=frozenset(cyclic),
        deps={k: frozenset(v) for k, v in deps.items()},
        has_constraints=any(r.is_constraint for r in p.rules),
    )


# -- the top-down engine -----------------------------------------------------

@dataclass(frozen=True)
class _Frame:
    kind: str  # "call" or "naf"
    key: Literal
    table: Optional["_Table"] = None


class _Table:
    __slots__ = ("answers", "seen", "looped")

    def __init__(self):
        self.answers = []
        self.seen = set()
        self.looped = False


def _ancestors(anc):
    while anc is not None:
        yield anc[0]
        anc = anc[1]


def variant_key(l: Literal) -> Literal:
    vs = variables(l)
    if not vs:
        return l
    return apply({v: Variable(f"_V{i}") for i, v in enumerate(vs)}, l)


class _Session:
    def __init__(self, program: Program, cfg: SolverConfig):
        self.program = program
        self.cfg = cfg
        self.index: dict = {}
        for i, r in enumerate(program.rules, 1):
            if r.head is not None:
                self.index.setdefault(r.head.key, []).append((i, r))
        self.memo: dict = {}
        self.fresh = 0
        self.trace: list = []

    def log(self, depth: int, event: str, what) -> None:
        if self.cfg.trace:
            self.trace.append(f"{depth}\t{event}\t{what}")

    def run(self, body: tuple) -> Iterator[tuple]:
        indexed = tuple(enumerate(body))
        for s, js in self.solve_body(indexed, {}, None, 0):
            yield s, tuple(js[i] for i in range(len(body)))

    # body literal selection: leftmost positive literal or ground naf literal
    def solve_body(self, lits: tuple, s: dict, anc, depth: int):
        if not lits:
            yield s, {}
            return
        pick = None
        for n, (_, b) in enumerate(lits):
            if not b.naf or is_ground(apply(s, b.literal)):
                pick = n
                break
        if pick is None:
            bad = apply(s, lits[0][1])
            raise Rejected("non-ground-naf", f"'{bad}' is still non-ground when selected")
        pos, b = lits[pick]
        rest = lits[:pick] + lits[pick + 1:]
        sub = self.solve_naf(b, s, anc, depth) if b.naf else self.call(b.literal, s, anc, depth + 1)
        for s2, j in sub:
            for s3, js in self.solve_body(rest, s2, anc, depth):
                js[pos] = j
                yield s3, js

    def call(self, lit: Literal, s: dict, anc, depth: int):
        goal = apply(s, lit)
        key = variant_key(goal)
        if depth > self.cfg.max_depth:
            chain = [str(f.key) for f in _ancestors(anc)]
            chain = chain[:20] + (["..."] if len(chain) > 20 else [])
            raise Rejected("depth", f"max depth {self.cfg.max_depth} exceeded at {goal}; "
                                    f"call chain (innermost first): {' <- '.join(chain)}")
        crossed = False
        for f in _ancestors(anc):
            if f.kind == "naf":
                crossed = True
            elif f.key == key:
                if crossed:
                    raise NegativeLoop(goal)
                yield from self._consume(goal, s, f.table, depth)
                return
        table = _Table()
        inner = (_Frame("call", key, table), anc)
        self.log(depth, "call", goal)
        while True:
            table.looped = False
            added = False
            for s2, just in self._resolve(goal, s, inner, depth):
                inst = apply(s2, goal)
                ikey = variant_key(inst)
                if ikey in table.seen:
                    continue
                table.seen.add(ikey)
                table.answers.append((inst, just))
                added = True
                self.log(depth, "exit", inst)
                yield s2, just
            if not (table.looped and added):
                break
        self.log(depth, "fail", goal)

    def _consume(self, goal, s, table, depth):
        table.looped = True
        self.log(depth, "call", goal)
        for inst, just in list(table.answers):
            self.fresh += 1
            inst = apply({v: Variable(f"{v.name}@{self.fresh}") for v in variables(inst)}, inst)
            s2 = unify_into(goal, inst, s)
            if s2 is not None:
                self.log(depth, "exit", inst)
                yield s2, just
        self.log(depth, "fail", goal)

    def _resolve(self, goal: Literal, s: dict, anc, depth: int):
        for rid, rule in self.index.get(goal.key, ()):
            self.fresh += 1
            r = rename(rule, str(self.fresh))
            s1 = unify_into(r.head, goal, s)
            if s1 is None:
                continue
            if not r.body:
                kind = "classical-fact" if r.head.negated else "fact"
                yield s1, Justification(kind, apply(s1, goal), rid)
                continue
            indexed = tuple(enumerate(r.body))
            for s2, js in self.solve_body(indexed, s1, anc, depth):
                kids = tuple(js[i] for i in range(len(r.body)))
                yield s2, Justification("rule", apply(s2, goal), rid, kids)

    def finitely_fails(self, l: Literal, anc, depth: int) -> bool:
        if l in self.memo:
            return self.memo[l]
        for f in _ancestors(anc):
            if f.kind == "naf" and f.key == l:
                raise NegativeLoop(l)
        gen = self.call(l, {}, (_Frame("naf", l), anc), depth + 1)
        try:
            fails = next(gen, None) is None
        finally:
            gen.close()
        self.memo[l] = fails
        return fails

    def solve_naf(self, b: BodyLiteral, s: dict, anc, depth: int):
        l = apply(s, b.literal)
        if self.finitely_fails(l, anc, depth):
            self.log(depth, "assume", f"not {l}")
            yield s, Justification("naf", BodyLiteral(l, True))


# -- running with a deep stack -------------------------------------------------

_STACK_LOCK = threading.Lock()
_STACK_BYTES = 512 * 1024 * 1024


def _run_deep(fn, *args):
    """Run ``fn`` on a thread with a large stack so deep proofs do not overflow."""
    box: dict = {}

    def target():
        try:
            box["value"] = fn(*args)
        except BaseException as e:  # re-raised in the caller
            box["error"] = e

    with _STACK_LOCK:
        old = threading.stack_size()
        threading.stack_size(_STACK_BYTES)
        try:
            t = threading.Thread(target=target, name="caspr-solve")
            t.start()
        finally:
            threading.stack_size(old)
    t.join()
    if "error" in box:
        raise box["error"]
    return box["value"]


def _ensure_recursion_limit():
    if sys.getrecursionlimit() < 200_000:
        sys.setrecursionlimit(200_000)


# -- solving -----------------------------------------------------------------

def _restrict(s: dict, q: Query) -> dict:
    return {v: apply(s, v) for v in q.free_variables}


def _topdown(p: Program, q: Query, cfg: SolverConfig, trace: list) -> list:
    sess = _Session(p, cfg)
    answers, seen = [], set()
    gen = sess.run(q.body)
    try:
        for s, js in gen:
            b = _restrict(s, q)
            k = variant_key(Literal(_answer_atom(b)))
            if k in seen:
                continue
            seen.add(k)
            j = _join(js, b)
            answers.append(Answer(b, j))
            if cfg.max_answers is not None and len(answers) >= cfg.max_answers:
                break
    finally:
        gen.close()
        trace.extend(sess.trace)
    return answers


def _answer_atom(b: dict) -> Atom:
    return Atom("answer", tuple(b.values()))


def _join(js: tuple, b: dict) -> Justification:
    # one proof per query literal; conjunctive queries get a "query" root
    return js[0] if len(js) == 1 else Justification("query", Literal(_answer_atom(b)), None, js)


@functools.lru_cache(maxsize=256)
def _stratified_consistent(p: Program, cfg: SolverConfig) -> bool:
    an = analyze(p)
    for name, arity in sorted(an.conflicts):
        a = Atom(name, tuple(Variable(f"X{i}") for i in range(arity)))
        q = Query((BodyLiteral(Literal(a)), BodyLiteral(Literal(a, True))))
        if _topdown(p, q, SolverConfig(cfg.max_depth, 1, False, False, cfg.ceiling), []):
            return False
    return True


@dataclass
class FallbackResult:
    verdict: bool
    slice_size: int
    answers: list
    model: Optional[oracle.StableModel] = None


def _slice(p: Program, seeds) -> Program:
    keys = analyze(p).closure(seeds)
    idx = [i for i, r in enumerate(p.rules) if r.head is not None and r.head.key in keys]
    return Program(tuple(p.rules[i] for i in idx), tuple(str(i + 1) for i in idx))


def check_consistency_fallback(p: Program, naf_cycle_atoms, cfg: SolverConfig = SolverConfig(),
                               query: Optional[Query] = None) -> FallbackResult:
    """Decide a query (or bare consistency) on the relevant ground slice by brute force.

    The slice holds every rule reachable through the predicate dependency
    graph from the cycle atoms, the query's literals and the program's
    non-stratified or conflicting part; the rest of the program has exactly
    one extension of any answer set of the slice, so brave truth on the slice
    is brave truth on the whole program.
    """
    an = analyze(p)
    seeds = {a.key if isinstance(a, Literal) else Literal(a).key for a in naf_cycle_atoms}
    seeds |= an.cyclic
    for name, arity in an.conflicts:
        seeds |= {(name, arity, False), (name, arity, True)}
    if query is not None:
        seeds |= {b.literal.key for b in query.body}
    return _brave(_slice(p, seeds), query, cfg)


def _brave(sl: Program, query: Optional[Query], cfg: SolverConfig) -> FallbackResult:
    try:
        g = oracle.ground(sl, ceiling=cfg.ceiling)
        models = oracle.models_of_ground(g, cfg.ceiling)
    except oracle.GroundingError as e:
        raise Rejected("slice-too-large", str(e)) from None
    origins = [int(sl.provenance[i]) for i in g.origins]  # back to program rule ids
    if query is None:
        return FallbackResult(bool(models), len(g.rules), [], models[0] if models else None)
    answers, seen, first_model = [], set(), None
    for m in models:
        for s in _match_query(q_body=query.body, model=m):
            b = _restrict(s, query)
            k = tuple(b.values())
            if k in seen:
                continue
            seen.add(k)
            first_model = first_model or m
            js = tuple(_support(b_lit, s, m, g, origins) for b_lit in query.body)
            answers.append(Answer(b, _join(js, b)))
            if cfg.max_answers is not None and len(answers) >= cfg.max_answers:
                return FallbackResult(True, len(g.rules), answers, first_model)
    return FallbackResult(bool(answers), len(g.rules), answers, first_model)


def _match_query(q_body, model, s=None):
    s = {} if s is None else s
    if not q_body:
        yield s
        return
    pick = next((i for i, b in enumerate(q_body)
                 if not b.naf or is_ground(apply(s, b.literal))), None)
    if pick is None:
        raise Rejected("non-ground-naf", f"'{apply(s, q_body[0])}' is still non-ground when selected")
    b = q_body[pick]
    rest = q_body[:pick] + q_body[pick + 1:]
    if b.naf:
        if apply(s, b.literal) not in model:
            yield from _match_query(rest, model, s)
        return
    for l in model:
        s2 = unify_into(b.literal, l, s)
        if s2 is not None:
            yield from _match_query(rest, model, s2)


def _support(b: BodyLiteral, s: dict, model, g, origins) -> Justification:
    """Well-founded support of a literal in a stable model, as a proof tree."""
    l = apply(s, b.literal)
    if b.naf:
        return Justification("naf", BodyLiteral(l, True))
    red = [(r, o) for r, o in zip(g.rules, origins)
           if r.head is not None and not any(x.naf and x.literal in model for x in r.body)]
    stage: dict = {}
    level = 0
    while True:
        new = [r.head for r, _ in red if r.head not in stage
               and all(x.naf or x.literal in stage for x in r.body)]
        if not new:
            break
        for h in new:
            stage.setdefault(h, level)
        level += 1

    def build(lit):
        for r, o in red:
            if r.head == lit and all(x.naf or stage.get(x.literal, level) < stage[lit] for x in r.body):
                if not r.body:
                    return Justification("classical-fact" if lit.negated else "fact", lit, o)
                kids = tuple(Justification("naf", x) if x.naf else build(x.literal) for x in r.body)
                return Justification("rule", lit, o, kids)
        raise AssertionError(f"{lit} has no support in the model")

    return build(l)


def _solve(p: Program, q: Query, cfg: SolverConfig) -> SolveOutcome:
    _ensure_recursion_limit()
    trace: list = []
    an = analyze(p)
    if an.has_constraints:
        bad = next(r for r in p.rules if r.is_constraint)
        return SolveOutcome(REJECTED, reason=f"constraint: headless rule `{bad}` is not supported "
                                             f"by the goal-directed engine; use the oracle")
    try:
        answers = _topdown(p, q, cfg, trace)
    except Rejected as e:
        return SolveOutcome(REJECTED, reason=str(e), trace=trace)
    except NegativeLoop as e:
        if not cfg.fallback:
            return SolveOutcome(REJECTED, reason=f"negative-loop: {e}; fallback disabled", trace=trace)
        try:
            fb = check_consistency_fallback(p, {e.literal}, cfg, q)
        except Rejected as r:
            return SolveOutcome(REJECTED, reason=str(r), trace=trace)
        return SolveOutcome(FALLBACK, fb.answers, fb.verdict, fb.slice_size,
                            f"loop through negation at {e.literal}", fb.model, trace)
    if not an.needs_global_check:
        return SolveOutcome(SUCCESS if answers else FAILURE, answers, trace=trace)
    if an.stratified:
        try:
            ok = _stratified_consistent(p, cfg)
        except Rejected as e:
            return SolveOutcome(REJECTED, reason=f"consistency check: {e}", trace=trace)
        if not ok:
            return SolveOutcome(FAILURE, [], reason="program has no answer set "
                                                    "(a literal and its complement are both derivable)",
                                trace=trace)
        return SolveOutcome(SUCCESS if answers else FAILURE, answers, trace=trace)
    if not cfg.fallback:
        return SolveOutcome(REJECTED, reason="unchecked-consistency: program has negative cycles "
                                             "and fallback is disabled", trace=trace)
    try:
        fb = _cached_consistency(p, cfg.ceiling)
    except Rejected as e:
        return SolveOutcome(REJECTED, reason=str(e), trace=trace)
    verdict = fb.verdict and bool(answers)
    return SolveOutcome(FALLBACK, answers if fb.verdict else [], verdict, fb.slice_size,
                        "global consistency of the non-stratified part"
                        + ("" if fb.verdict else ": no answer set"), None, trace)


def oracle_solve(p: Program, q: Query, cfg: SolverConfig = SolverConfig()) -> SolveOutcome:
    """Brave answers by grounding and enumerating the whole program."""
    numbered = Program(p.rules, tuple(str(i + 1) for i in range(len(p.rules))))
    try:
        fb = _brave(numbered, q, cfg)
    except Rejected as e:
        return SolveOutcome(REJECTED, reason=str(e))
    return SolveOutcome(SUCCESS if fb.verdict else FAILURE, fb.answers, fb.verdict,
                        fb.slice_size, "", fb.model)


@functools.lru_cache(maxsize=256)
def _cached_consistency(p: Program, ceiling: int) -> FallbackResult:
    return check_consistency_fallback(p, set(), SolverConfig(ceiling=ceiling))


def solve(p: Program, q: Query, cfg: SolverConfig = SolverConfig()) -> SolveOutcome:
    if threading.current_thread().name == "caspr-solve":
        return _solve(p, q, cfg)
    return _run_deep(_solve, p, q, cfg)


def answer_all(p: Program, q: Query, cfg: SolverConfig = SolverConfig()) -> list[dict]:
    """Distinct bindings of the query's free variables; raises :class:`Rejected`."""
    out = solve(p, q, cfg)
    if out.rejected:
        kind, _, detail = out.reason.partition(": ")
        raise Rejected(kind, detail)
    return [a.bindings for a in out.answers] if out.succeeded else []


def solve_literal(p: Program, l: Literal, cfg: SolverConfig = SolverConfig()) -> SolveOutcome:
    return solve(p, Query((BodyLiteral(l),)), cfg)


# -- replaying justifications ----------------------------------------------------

def replay(p: Program, j: Justification, cfg: SolverConfig = SolverConfig(),
           model: Optional[oracle.StableModel] = None) -> list[str]:
    """Check a proof tree node by node; returns the problems found (empty = valid).

    Facts and rule applications are matched against the program.  Each naf
    assumption is re-checked by a fresh solve of the assumed-false literal, or
    against ``model`` when the proof came from the oracle fallback.
    """
    problems: list = []
    _replay(p, j, cfg, model, problems)
    return problems


def _replay(p, j, cfg, model, problems):
    if j.kind == "naf":
        l = j.conclusion.literal
        if not is_ground(l):
            problems.append(f"naf assumption {j.conclusion} is not ground")
        elif model is not None:
            if l in model:
                problems.append(f"{j.conclusion}: {l} is in the model")
        else:
            out = solve_literal(p, l, cfg)
            if out.succeeded or out.rejected:
                problems.append(f"{j.conclusion}: fresh solve of {l} gave {out.status}")
        return
    if j.kind == "query":
        for c in j.children:
            _replay(p, c, cfg, model, problems)
        return
    if not 1 <= j.rule_id <= len(p.rules):
        problems.append(f"{j.conclusion}: no rule {j.rule_id}")
        return
    rule = rename(p.rules[j.rule_id - 1], "replay")
    if rule.head is None:
        problems.append(f"{j.conclusion}: rule {j.rule_id} is a constraint")
        return
    if j.kind in ("fact", "classical-fact") and rule.body:
        problems.append(f"{j.conclusion}: rule {j.rule_id} is not a fact")
        return
    if (j.kind == "classical-fact") != rule.head.negated and j.kind != "rule":
        problems.append(f"{j.conclusion}: fact kind does not match the sign of rule {j.rule_id}")
    if len(j.children) != len(rule.body):
        problems.append(f"{j.conclusion}: {len(j.children)} children for a body of {len(rule.body)}")
        return
    s = unify_into(rule.head, j.conclusion, {})
    if s is None:
        problems.append(f"{j.conclusion}: does not match the head of rule {j.rule_id}")
        return
    for b, c in zip(rule.body, j.children):
        concl = c.conclusion.literal if c.kind == "naf" else c.conclusion
        if (c.kind == "naf") != b.naf:
            problems.append(f"{j.conclusion}: child {c.conclusion} does not match {b}")
            return
        s = unify_into(b.literal, concl, s)
        if s is None:
            problems.append(f"{j.conclusion}: child {c.conclusion} does not unify with {b}")
            return
    for c in j.children:
        _replay(p, c, cfg, model, problems)
