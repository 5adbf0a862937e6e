"""Question answering over passage + knowledge base, and result scoring."""
from __future__ import annotations

import csv
import io
import os
import re
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from typing import Iterable, Optional

from .defaults import DefaultsFile, compile_all
from .ingest import IngestError, load_dependency_triples, parse_triple_row, translate_question
from .kb import ContextProfile, apply_senses, compile_kb
from .parser import Query, parse_query
from .solver import Justification, SolverConfig, replay, solve
from .terms import Program

NO_ANSWER = "no-answer"
_ARTICLES = re.compile(r"\b(a|an|the)\b")


@dataclass
class QARecord:
    qid: str
    predicted: str
    gold: list
    correct: bool
    reason: str = ""
    justification: Optional[Justification] = None
    query: str = ""

    def to_row(self) -> dict:
        return {"qid": self.qid, "predicted": self.predicted, "gold": "|".join(self.gold),
                "correct": str(self.correct).lower(), "reason": self.reason}

    def to_dict(self) -> dict:
        d = self.to_row()
        d["correct"] = self.correct
        d["gold"] = list(self.gold)
        d["query"] = self.query
        d["justification"] = self.justification.to_dict() if self.justification else None
        return d


def normalize(text: str) -> str:
    t = text.strip().lower()
    t = re.sub(r"[.!?,;:]+$", "", t)
    t = _ARTICLES.sub(" ", t)
    return " ".join(t.split())


def match(predicted: str, gold: Iterable[str]) -> bool:
    """True iff the normalized prediction equals, contains, or is contained in a gold answer."""
    p = normalize(predicted)
    if not p:
        return False
    for g in gold:
        g = normalize(g)
        if g and (p == g or p in g or g in p):
            return True
    return False


def render_term(t) -> str:
    return str(t).replace("_", " ")


@dataclass
class AnswerFragment:
    predicted: str
    justification: Optional[Justification]
    reason: str


def answer_question(passage: Program, kb: Program, q: Query,
                    cfg: SolverConfig = SolverConfig(max_answers=1)) -> AnswerFragment:
    """First answer in solver order for the combined program."""
    out = solve(passage + kb, q, cfg)
    if out.rejected:
        return AnswerFragment(NO_ANSWER, None, out.reason)
    if not q.free_variables:
        j = out.answers[0].justification if out.succeeded and out.answers else None
        return AnswerFragment("yes" if out.succeeded else "no", j, out.reason)
    if not out.succeeded or not out.answers:
        return AnswerFragment(NO_ANSWER, None, out.reason or "no answer derivable")
    a = out.answers[0]
    return AnswerFragment(render_term(a.bindings[q.free_variables[0]]), a.justification, out.reason)


@dataclass
class QAContext:
    """Everything a batch run needs besides the questions."""

    passage: Program
    kb_triples: list = field(default_factory=list)
    senses: dict = field(default_factory=dict)
    defaults: Optional[DefaultsFile] = None
    patterns: Optional[list] = None
    hops: int = 2
    cfg: SolverConfig = SolverConfig(max_answers=1)

    def knowledge_for(self, q: Query) -> Program:
        ctx = ContextProfile.from_program(self.passage, q)
        triples = apply_senses(self.kb_triples, self.senses, ctx) if self.senses else self.kb_triples
        ckb = compile_kb(triples, ctx, self.hops)
        specs, prefs = ckb.defaults, []
        if self.defaults is not None:
            specs = self.defaults.merged_with(ckb.defaults, strict=False)
            names = {d.name for d in specs}
            prefs = [p for p in self.defaults.preferences if p.preferred in names and p.over in names]
        return ckb.facts.extend(compile_all(specs, prefs), "default-layer")

    def ask(self, qid: str, triples, gold: list) -> QARecord:
        try:
            q = translate_question(triples, self.patterns)
        except IngestError as e:
            return QARecord(qid, NO_ANSWER, gold, match(NO_ANSWER, gold), f"translation: {e}")
        kb = self.knowledge_for(q)
        frag = answer_question(self.passage, kb, q, self.cfg)
        return QARecord(qid, frag.predicted, gold, match(frag.predicted, gold), frag.reason,
                        frag.justification, str(q))

    def program_for(self, q: Query) -> Program:
        return self.passage + self.knowledge_for(q)


def _natural_key(s: str):
    return [int(x) if x.isdigit() else x for x in re.split(r"(\d+)", s)]


def run_batch(ctx: QAContext, questions: dict, gold: dict) -> list[QARecord]:
    """Answer every question; records are ordered by qid."""
    return [ctx.ask(qid, questions[qid], gold.get(qid, [])) for qid in sorted(questions, key=_natural_key)]


def load_questions(path) -> dict:
    """Question triples keyed by qid.

    Lines are ``qid<TAB>triples-file``, ``qid`` followed by the 8 triple
    columns, or bare 8-column triples whose sentence id is the qid.
    """
    base = os.path.dirname(os.fspath(path))
    out: dict = {}
    with open(path, encoding="utf-8") as fh:
        rows = csv.reader(fh, delimiter="\t", quoting=csv.QUOTE_NONE)
        for lineno, row in enumerate(rows, 1):
            if not row or not "".join(row).strip() or row[0].startswith("#"):
                continue
            qid = row[0].strip()
            if len(row) == 2:
                out[qid] = load_dependency_triples(os.path.join(base, row[1].strip()))
            elif len(row) == 8:
                out.setdefault(qid, []).append(parse_triple_row(row, f"line {lineno}: "))
            elif len(row) == 9:
                out.setdefault(qid, []).append(parse_triple_row(row[1:], f"line {lineno}: "))
            else:
                raise IngestError(f"line {lineno}: expected 2, 8 or 9 tab-separated columns")
    return out


def load_gold(path) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip() or line.startswith("#"):
                continue
            qid, _, answers = line.rstrip("\n").partition("\t")
            out[qid.strip()] = [a.strip() for a in answers.split("|") if a.strip()]
    return out


REPORT_COLUMNS = ("qid", "predicted", "gold", "correct", "reason")


def write_report(records: list[QARecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=REPORT_COLUMNS)
        w.writeheader()
        for r in records:
            w.writerow(r.to_row())


def replay_record(ctx: QAContext, r: QARecord) -> list[str]:
    """Re-validate a record's justification against the program it came from."""
    if r.justification is None:
        return ["no justification"]
    q = parse_query(r.query)
    return replay(ctx.program_for(q), r.justification, ctx.cfg)


# -- scoring ------------------------------------------------------------------

def _pct(x: Fraction) -> Decimal:
    return (Decimal(x.numerator) / Decimal(x.denominator)).quantize(Decimal("0.01"), ROUND_HALF_UP)


@dataclass(frozen=True)
class ScoreRow:
    name: str
    correct: int
    count: int

    @property
    def exact(self) -> Fraction:
        return Fraction(100 * self.correct, self.count)

    @property
    def percent(self) -> Decimal:
        return _pct(self.exact)


@dataclass
class ScoreTable:
    rows: list

    @property
    def total(self) -> ScoreRow:
        return ScoreRow("Total", sum(r.correct for r in self.rows), sum(r.count for r in self.rows))

    @property
    def average(self) -> Decimal:
        """Mean of the per-article percents (macro average)."""
        return _pct(sum((r.exact for r in self.rows), Fraction(0)) / len(self.rows))

    def render(self) -> str:
        w = max([len(r.name) for r in self.rows] + [len("Average Result")])
        lines = [f"{'No':>3}  {'Article':<{w}}  {'Correct':>7}  {'Count':>5}  {'Percent':>7}"]
        for i, r in enumerate(self.rows, 1):
            lines.append(f"{i:>3}  {r.name:<{w}}  {r.correct:>7}  {r.count:>5}  {r.percent:>7}")
        t = self.total
        lines.append(f"{'':>3}  {'Total':<{w}}  {t.correct:>7}  {t.count:>5}  {t.percent:>7}")
        lines.append(f"{'':>3}  {'Average Result':<{w}}  {'':>7}  {'':>5}  {self.average:>7}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        t = self.total
        return {
            "rows": [{"article": r.name, "correct": r.correct, "count": r.count,
                      "percent": str(r.percent)} for r in self.rows],
            "total": {"correct": t.correct, "count": t.count, "percent": str(t.percent),
                      "label": "micro average"},
            "average": {"percent": str(self.average), "label": "macro average"},
        }


def parse_results(text: str) -> ScoreTable:
    rows = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), 1):
        if not row or not "".join(row).strip():
            continue
        if len(row) != 3:
            raise ValueError(f"line {lineno}: expected article,correct,count")
        name, c, n = (x.strip() for x in row)
        if lineno == 1 and not c.lstrip("-").isdigit():
            continue  # header
        c, n = int(c), int(n)
        if c < 0 or n <= 0 or c > n:
            raise ValueError(f"line {lineno}: need 0 <= correct <= count and count > 0")
        rows.append(ScoreRow(name, c, n))
    if not rows:
        raise ValueError("no result rows")
    return ScoreTable(rows)


def score_run(path) -> ScoreTable:
    with open(path, encoding="utf-8") as fh:
        return parse_results(fh.read())
