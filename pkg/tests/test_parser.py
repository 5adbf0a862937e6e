import pytest
from hypothesis import given, settings, strategies as st

from caspr.parser import ParseError, parse_literal, parse_program, parse_query, parse_rule, to_text
from caspr.terms import Variable


def diag(text):
    with pytest.raises(ParseError) as e:
        parse_program(text)
    return e.value.diagnostics


def test_round_trip_simple():
    src = "p(X) :- q(X, f(Y)), not -r(Y).\n:- a, b.\n-s(1).\n"
    assert to_text(parse_program(src)) == src


def test_provenance_is_line_based():
    p = parse_program("a.\n\nb :- a.\n", source="demo.lp")
    assert p.provenance == ("demo.lp:1", "demo.lp:3")
    assert "% demo.lp:3" in to_text(p, provenance=True)


@pytest.mark.parametrize("text, line, col, fragment", [
    ("p(X) :- not not q(X).", 1, 13, "nested 'not'"),
    ("not p.", 1, 1, "head"),
    ("P(a).", 1, 1, "lowercase"),
    ("p(a)", 1, 5, "unterminated"),
    ("p :- q(F(a)).", 1, 8, "functor"),
    ("--p.", 1, 2, "doubled"),
    ("p(a).\nq(b) :- $r.", 2, 9, "unexpected character"),
])
def test_diagnostics(text, line, col, fragment):
    d = diag(text)[0]
    assert (d.line, d.column) == (line, col)
    assert fragment in d.message


def test_recovers_and_reports_several_errors():
    ds = diag("P(a).\nok(b).\nq :- not not r.\n")
    assert [d.line for d in ds] == [1, 3]


def test_anonymous_variables_are_distinct_and_not_free():
    q = parse_query("p(X, _), q(_)")
    assert q.free_variables == (Variable("X"),)
    r = parse_rule("p(X) :- q(X, _, _).")
    names = [str(t) for t in r.body[0].literal.atom.args[1:]]
    assert names[0] != names[1]


def test_query_forms():
    assert str(parse_query("?- p(X).")) == str(parse_query("p(X)"))
    with pytest.raises(ParseError):
        parse_query("?- .")


def test_literal():
    l = parse_literal("-flies(tweety)")
    assert l.negated and l.atom.predicate == "flies"


# -- generated programs ---------------------------------------------------------

idents = st.sampled_from(["a", "b", "tweety", "p0", "x_y"])
vars_ = st.sampled_from(["X", "Y", "Zed"])
terms = st.recursive(idents | vars_ | st.integers(0, 99).map(str),
                     lambda ch: st.builds(lambda fn, args: f"{fn}({', '.join(args)})",
                                          idents, st.lists(ch, min_size=1, max_size=2)),
                     max_leaves=4)
atoms = st.builds(lambda p, args: f"{p}({', '.join(args)})" if args else p,
                  st.sampled_from(["p", "q", "r_1"]), st.lists(terms, max_size=2))
literals = st.builds(lambda neg, a: ("-" if neg else "") + a, st.booleans(), atoms)
body_lits = st.builds(lambda naf, l: ("not " if naf else "") + l, st.booleans(), literals)
rules = st.one_of(
    literals.map(lambda h: h + "."),
    st.builds(lambda h, b: f"{h} :- {', '.join(b)}.", literals, st.lists(body_lits, min_size=1, max_size=3)),
    st.lists(body_lits, min_size=1, max_size=3).map(lambda b: f":- {', '.join(b)}."),
)


@settings(max_examples=200, deadline=None)
@given(st.lists(rules, min_size=1, max_size=6))
def test_round_trip_generated(lines):
    src = "\n".join(lines) + "\n"
    p = parse_program(src)
    assert to_text(p) == src
    assert parse_program(to_text(p)).rules == p.rules


@settings(max_examples=150, deadline=None)
@given(st.lists(rules, min_size=1, max_size=4), st.data())
def test_corruption_reported_at_its_position(lines, data):
    line_no = data.draw(st.integers(0, len(lines) - 1))
    text = lines[line_no]
    col = data.draw(st.integers(0, len(text)))
    lines = list(lines)
    lines[line_no] = text[:col] + "$" + text[col:]
    ds = diag("\n".join(lines))
    # splitting a token such as ":-" may produce an earlier error on the same line
    assert ds[0].line == line_no + 1 and ds[0].column <= col + 1
    assert any(d.token == "$" and (d.line, d.column) == (line_no + 1, col + 1) for d in ds)
