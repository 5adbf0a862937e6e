from decimal import Decimal

import pytest

from caspr.defaults import load_defaults
from caspr.ingest import ingest, load_patterns
from caspr.kb import load_senses, load_triples
from caspr.parser import parse_program, parse_query
from caspr.qa import (
    NO_ANSWER, QAContext, answer_question, load_gold, load_questions, match, normalize,
    parse_results, replay_record, run_batch, write_report,
)

PASSAGES = ["dog", "heap", "oak", "paris", "penguin", "texas", "train", "tweety"]


@pytest.mark.parametrize("pred, gold, ok", [
    ("engine", ["the engine"], True),
    ("The Engine.", ["engine"], True),
    ("old dog", ["dog"], True),
    ("dog", ["the old dog"], True),
    ("cat", ["dog"], False),
    ("", ["dog"], False),
    ("the", ["the dog"], False),
])
def test_match(pred, gold, ok):
    assert match(pred, gold) is ok


def test_normalize():
    assert normalize("  The  Old Dog! ") == "old dog"


def test_answer_question_shapes():
    passage = parse_program("event(break_down, engine).")
    empty = parse_program("")
    assert answer_question(passage, empty, parse_query("event(break_down, X)")).predicted == "engine"
    assert answer_question(passage, empty, parse_query("event(X, engine)")).predicted == "break down"
    yes = answer_question(passage, empty, parse_query("event(break_down, engine)"))
    assert yes.predicted == "yes" and yes.justification is not None
    assert answer_question(passage, empty, parse_query("event(fly, engine)")).predicted == "no"
    miss = answer_question(passage, empty, parse_query("event(fly, X)"))
    assert miss.predicted == NO_ANSWER and miss.reason
    rej = answer_question(parse_program("r(X) :- not p(X)."), empty, parse_query("r(X)"))
    assert rej.predicted == NO_ANSWER and rej.reason.startswith("non-ground-naf")


def context(fixtures, name):
    kb = fixtures / "kb"
    return QAContext(
        passage=ingest(fixtures / "qa" / name / "passage.tsv"),
        kb_triples=load_triples(kb / "kb.tsv"),
        senses=load_senses(kb / "senses.tsv"),
        defaults=load_defaults(kb / "birds.defaults"),
        patterns=load_patterns(),
    )


@pytest.mark.parametrize("name", PASSAGES)
def test_fixture_passages(fixtures, name):
    d = fixtures / "qa" / name
    ctx = context(fixtures, name)
    records = run_batch(ctx, load_questions(d / "questions.tsv"), load_gold(d / "gold.tsv"))
    assert records and all(r.correct for r in records), [(r.qid, r.predicted, r.reason) for r in records]
    for r in records:
        if r.justification is not None:
            assert replay_record(ctx, r) == []


def test_records_are_ordered_by_qid(fixtures):
    ctx = context(fixtures, "train")
    qs = load_questions(fixtures / "qa" / "train" / "questions.tsv")
    shuffled = {f"q{n}": qs["q1"] for n in (10, 2, 1)}
    assert [r.qid for r in run_batch(ctx, shuffled, {})] == ["q1", "q2", "q10"]


def test_untranslatable_question_is_a_no_answer_record(fixtures):
    from caspr.ingest import DependencyTriple, Token
    ctx = context(fixtures, "train")
    bad = [DependencyTriple("q", Token("ROOT", "root", "ROOT"), "root", Token("hi", "hi", "INTJ"))]
    r = run_batch(ctx, {"q9": bad}, {"q9": ["engine"]})[0]
    assert r.predicted == NO_ANSWER and r.reason.startswith("translation") and not r.correct


def test_report_csv(fixtures, tmp_path):
    ctx = context(fixtures, "train")
    d = fixtures / "qa" / "train"
    out = tmp_path / "r.csv"
    write_report(run_batch(ctx, load_questions(d / "questions.tsv"), load_gold(d / "gold.tsv")), out)
    assert out.read_text().splitlines()[:2] == ["qid,predicted,gold,correct,reason", "q1,engine,engine,true,"]


def test_scoring_rounds_half_up_and_averages_exact_percents():
    t = parse_results("a,1,8\nb,1,3\n")
    assert [r.percent for r in t.rows] == [Decimal("12.50"), Decimal("33.33")]
    assert t.total.percent == Decimal("18.18")
    # mean of 12.5 and 33.333.. is 22.9166..; mean of rounded values would be 22.915
    assert t.average == Decimal("22.92")
    assert parse_results("article,correct,count\nx,1,2\n").rows[0].percent == Decimal("50.00")


@pytest.mark.parametrize("text", ["a,3,2\n", "a,1,0\n", "a,1\n", ""])
def test_scoring_rejects_bad_rows(text):
    with pytest.raises(ValueError):
        parse_results(text)
