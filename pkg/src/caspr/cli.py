"""Command-line entry point: ``caspr solve|models|ingest|qa|score|repl``.

Exit status is 0 on success, 1 when input produced diagnostics (parse
errors, rejected queries, malformed data) and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings

from . import oracle
from .defaults import DefaultsError, load_defaults
from .ingest import IngestError, coverage_report, load_dependency_triples, load_patterns, relations_to_program
from .kb import ContextProfile, KBError, apply_senses, compile_kb, load_senses, load_triples
from .parser import ParseError, load_program, parse_program, parse_query, to_text
from .qa import QAContext, load_gold, load_questions, run_batch, score_run, write_report
from .solver import SolverConfig, oracle_solve, solve
from .terms import Program

DIAGNOSTIC_ERRORS = (ParseError, DefaultsError, IngestError, KBError, oracle.GroundingError,
                     ValueError, OSError)


def _emit(args, payload: dict, text: str) -> None:
    if getattr(args, "json", False):
        print(json.dumps(payload, indent=2))
    else:
        print(text)


def run_query(p: Program, query: str, engine: str = "goal", all_answers: bool = False,
              trace: bool = False):
    cfg = SolverConfig(max_answers=None if all_answers else 1, trace=trace)
    q = parse_query(query)
    return (oracle_solve if engine == "oracle" else solve)(p, q, cfg)


def _outcome_text(out, justify: bool, trace: bool) -> str:
    text = out.render(justify)
    if trace and out.trace:
        text = "\n".join(out.trace) + "\n" + text
    return text


def cmd_solve(args) -> int:
    p = load_program(args.program)
    out = run_query(p, args.query, args.engine, args.all, args.trace)
    payload = out.to_dict()
    if args.trace:
        payload["trace"] = out.trace
    _emit(args, payload, _outcome_text(out, args.justify, args.trace))
    return 1 if out.rejected else 0


def cmd_models(args) -> int:
    p = load_program(args.program)
    models = oracle.stable_models(p, depth_bound=args.depth, ceiling=args.ceiling,
                                  max_models=args.max)
    _emit(args, {"models": [sorted(str(l) for l in m.literals) for m in models]},
          "\n".join(str(m) for m in models) if models else "no answer sets")
    return 0


def cmd_ingest(args) -> int:
    triples = load_dependency_triples(args.triples)
    ext = coverage_report(triples, load_patterns(args.patterns))
    prog = relations_to_program(ext.relations)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(to_text(prog, provenance=True))
    _emit(args, {"relations": [str(r) for r in ext.relations], "consumed": ext.consumed,
                 "total": ext.total, "coverage": round(ext.coverage, 2)},
          f"{len(ext.relations)} relations written to {args.out}; "
          f"coverage {ext.consumed}/{ext.total} triples ({ext.coverage:.1f}%)")
    return 0


def cmd_qa(args) -> int:
    patterns = load_patterns(args.patterns)
    facts = load_program(args.facts) if args.facts.endswith(".lp") else relations_to_program(
        coverage_report(load_dependency_triples(args.facts), patterns).relations)
    ctx = QAContext(
        passage=facts,
        kb_triples=load_triples(args.kb_triples) if args.kb_triples else [],
        senses=load_senses(args.senses) if args.senses else {},
        defaults=load_defaults(args.defaults) if args.defaults else None,
        patterns=patterns,
        hops=args.hops,
    )
    records = run_batch(ctx, load_questions(args.questions), load_gold(args.gold))
    write_report(records, args.report)
    n = len(records)
    c = sum(r.correct for r in records)
    lines = [f"{r.qid}\t{r.predicted}\t{'ok' if r.correct else 'wrong'}"
             + (f"\t{r.reason}" if r.reason else "") for r in records]
    lines.append(f"{c}/{n} correct")
    _emit(args, {"records": [r.to_dict() for r in records], "correct": c, "count": n},
          "\n".join(lines))
    return 0


def cmd_score(args) -> int:
    table = score_run(args.results)
    _emit(args, table.to_dict(), table.render())
    return 0


class Repl:
    """Line-oriented session; queries give the same outcome as ``solve``."""

    def __init__(self, program: Program, justify: bool = False, engine: str = "goal"):
        self.program = program
        self.justify = justify
        self.engine = engine

    def handle(self, line: str) -> str | None:
        line = line.strip()
        if not line or line.startswith("%"):
            return ""
        if line in (":quit", ":q"):
            return None
        if line.startswith(":load "):
            path = line.split(None, 1)[1]
            self.program = self.program + load_program(path)
            return f"loaded {path} ({len(self.program.rules)} rules)"
        if line.startswith(":justify"):
            self.justify = line.split()[-1] != "off"
            return f"justify {'on' if self.justify else 'off'}"
        if line.startswith(":assert "):
            rules = parse_program(line.split(None, 1)[1], "<repl>").rules
            self.program = self.program.extend(rules, "<repl>")
            return f"added {len(rules)} rule(s)"
        if line.startswith(":"):
            return f"unknown command {line.split()[0]} (:load FILE, :assert RULE, :justify on|off, :quit)"
        return run_query(self.program, line, self.engine).render(self.justify)


def cmd_repl(args) -> int:
    p = load_program(args.program) if args.program else Program()
    if args.kb_triples:
        kb = load_triples(args.kb_triples)
        ctx = ContextProfile.from_program(p)
        if args.senses:
            kb = apply_senses(kb, load_senses(args.senses), ctx)
        p = p + compile_kb(kb, ctx, args.hops).program
    repl = Repl(p, args.justify, args.engine)
    interactive = sys.stdin.isatty()
    status = 0
    while True:
        if interactive:
            print("?- ", end="", flush=True)
        line = sys.stdin.readline()
        if not line:
            break
        try:
            reply = repl.handle(line)
        except DIAGNOSTIC_ERRORS as e:
            reply = f"error: {e}"
            status = 1
        if reply is None:
            break
        if reply:
            print(reply, flush=True)
    return status


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="caspr", description="Goal-directed answer set QA toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="answer a query against a program")
    s.add_argument("--program", required=True)
    s.add_argument("--query", required=True)
    s.add_argument("--engine", choices=("goal", "oracle"), default="goal")
    s.add_argument("--all", action="store_true", help="enumerate every answer")
    s.add_argument("--justify", action="store_true")
    s.add_argument("--trace", action="store_true")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_solve)

    m = sub.add_parser("models", help="list answer sets by brute force")
    m.add_argument("--program", required=True)
    m.add_argument("--max", type=int, default=None)
    m.add_argument("--depth", type=int, default=None)
    m.add_argument("--ceiling", type=int, default=oracle.DEFAULT_CEILING)
    m.add_argument("--json", action="store_true")
    m.set_defaults(func=cmd_models)

    i = sub.add_parser("ingest", help="dependency triples to passage facts")
    i.add_argument("--triples", required=True)
    i.add_argument("--patterns", default=None)
    i.add_argument("--out", required=True)
    i.add_argument("--json", action="store_true")
    i.set_defaults(func=cmd_ingest)

    q = sub.add_parser("qa", help="answer a batch of questions")
    q.add_argument("--facts", required=True, help="passage as .lp facts or dependency-triple TSV")
    q.add_argument("--kb-triples", default=None)
    q.add_argument("--senses", default=None)
    q.add_argument("--defaults", default=None)
    q.add_argument("--questions", required=True)
    q.add_argument("--gold", required=True)
    q.add_argument("--report", required=True)
    q.add_argument("--patterns", default=None)
    q.add_argument("--hops", type=int, default=2)
    q.add_argument("--json", action="store_true")
    q.set_defaults(func=cmd_qa)

    c = sub.add_parser("score", help="tabulate per-article results")
    c.add_argument("--results", required=True)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_score)

    r = sub.add_parser("repl", help="interactive queries")
    r.add_argument("--program", default=None)
    r.add_argument("--kb-triples", default=None)
    r.add_argument("--senses", default=None)
    r.add_argument("--hops", type=int, default=2)
    r.add_argument("--engine", choices=("goal", "oracle"), default="goal")
    r.add_argument("--justify", action="store_true")
    r.set_defaults(func=cmd_repl)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except DIAGNOSTIC_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
