import itertools

import pytest
from hypothesis import given, settings, strategies as st

from caspr.terms import (
    Atom, Compound, Constant, Integer, Program, Rule, TermError, Variable,
    apply, atom, complement, depth, is_ground, lit, occurs, rename, unify, variables,
)

X, Y, Z = Variable("X"), Variable("Y"), Variable("Z")
a, b, c = Constant("a"), Constant("b"), Constant("c")


def f(*args):
    return Compound("f", args)


def test_validation():
    with pytest.raises(TermError):
        Variable("x")
    with pytest.raises(TermError):
        Constant("A")
    with pytest.raises(TermError):
        Atom("Bad", ())


def test_rendering():
    assert str(lit("p", "a", f(X), 3, negated=True)) == "-p(a, f(X), 3)"
    assert str(Rule(lit("p", "X"), ())) == "p(X)."
    assert str(atom("q")) == "q"


def test_complement_is_involution():
    l = lit("p", "a")
    assert complement(l) == lit("p", "a", negated=True)
    assert complement(complement(l)) == l


def test_unify_examples():
    s = unify(atom("p", X, f(Y)), atom("p", a, f(b)))
    assert s == {X: a, Y: b}
    assert unify(atom("p", X, X), atom("p", a, b)) is None
    assert unify(atom("p", X), atom("q", X)) is None
    assert unify(lit("p", X), lit("p", X, negated=True)) is None
    s = unify(atom("p", X, Y), atom("p", Y, f(Z)))
    assert apply(s, atom("p", X, Y)) == apply(s, atom("p", Y, f(Z)))


def test_occurs_check():
    assert unify(X, f(X)) is None
    assert unify(atom("p", X, f(X)), atom("p", Y, Y)) is None
    assert occurs(X, f(Y), {Y: f(X)})


def test_variables_first_occurrence_order():
    r = Rule(lit("h", Y, X), ())
    assert variables(r) == [Y, X]


def test_rename_keeps_structure_apart():
    r = Rule(lit("p", X), ())
    r2 = rename(r, "1")
    assert variables(r2) != [X]
    assert unify(r.head, r2.head) is not None


def test_program_addition():
    p = Program((Rule(lit("p", "a")),))
    q = p + Program((Rule(lit("q", "b")),))
    assert len(q.rules) == 2
    assert len(p.rules) == 1
    assert {str(k) for k in q.constants()} == {"a", "b"}


def test_depth():
    assert depth(a) == 0
    assert depth(f(f(a))) == 2
    assert depth(Integer(3)) == 0


# -- brute-force oracle for most general unifiers ------------------------------

UNIVERSE = [a, b, f(a), f(b)]


def _terms(max_depth):
    leaves = st.sampled_from([X, Y, Z, a, b])
    return st.recursive(leaves, lambda ch: st.builds(lambda t: Compound("f", (t,)), ch)
                        | st.builds(lambda s, t: Compound("g", (s, t)), ch, ch),
                        max_leaves=max_depth + 2)


def _instances(t1, t2, pool):
    """Ground substitutions over ``pool`` that make t1 and t2 equal."""
    vs = sorted(set(variables(t1)) | set(variables(t2)), key=lambda v: v.name)
    for combo in itertools.product(pool, repeat=len(vs)):
        s = dict(zip(vs, combo))
        if apply(s, t1) == apply(s, t2):
            yield s


@settings(max_examples=200, deadline=None)
@given(_terms(2), _terms(2))
def test_unify_agrees_with_brute_force(t1, t2):
    pool = [a, b, c, f(a), Compound("g", (a, b))]
    s = unify(t1, t2)
    ground_solutions = list(_instances(t1, t2, pool))
    if s is None:
        assert ground_solutions == []
        return
    assert apply(s, t1) == apply(s, t2)
    # most general: every ground solution is an instance of the mgu
    for g in ground_solutions:
        lhs = apply(s, t1)
        assert unify(lhs, apply(g, t1)) is not None


@settings(max_examples=100, deadline=None)
@given(_terms(2))
def test_unify_idempotent_and_ground_after_grounding(t):
    s = unify(t, t)
    assert s is not None
    ground = {v: a for v in variables(t)}
    assert is_ground(apply(ground, t))
