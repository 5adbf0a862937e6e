import random
from collections import Counter, deque

import pytest

from caspr.kb import (
    ConceptTriple, ContextProfile, KBError, KBWarning, apply_senses, compile_kb, disambiguate,
    isa_cycles, load_senses, load_triples, parse_triples, relevant,
)
from caspr.parser import parse_query
from caspr.solver import answer_all, solve


def test_load_triples_dedupes_by_max_weight():
    ts = parse_triples("a\tisa\tb\t0.2\na\tisa\tb\t0.9\nb\tpart_of\tc\n")
    assert sorted(ts) == [ConceptTriple("a", "isa", "b", 0.9), ConceptTriple("b", "part_of", "c", 1.0)]


def test_load_triples_diagnostics_name_lines():
    with pytest.raises(KBError) as e:
        parse_triples("a\tisa\tb\nx\tlikes\ty\nA\tisa\tb\nc\tisa\n")
    msgs = e.value.diagnostics
    assert [m.split(":")[0] for m in msgs] == ["line 2", "line 3", "line 4"]
    assert "unknown relation" in msgs[0]


def test_senses_fixture_loads(fixtures):
    index = load_senses(fixtures / "kb" / "senses.tsv")
    assert [s.sense_id for s in index["tree"]] == ["tree#plant", "tree#data_structure"]


def test_wsd_tree(fixtures):
    index = load_senses(fixtures / "kb" / "senses.tsv")
    cs = ContextProfile.from_tokens("a binary tree in computer science stores each node".split())
    bot = ContextProfile.from_tokens("the tree grows in the forest studied by botany".split())
    assert disambiguate("tree", index, cs)[0] == "tree#data_structure"
    assert disambiguate("tree", index, bot)[0] == "tree#plant"


def test_wsd_tie_goes_to_smallest_id(fixtures):
    index = load_senses(fixtures / "kb" / "senses.tsv")
    assert disambiguate("tree", index, ContextProfile())[0] == "tree#data_structure"


def test_wsd_unknown_word():
    with pytest.raises(KBError):
        disambiguate("zebra", {}, ContextProfile())


def test_wsd_is_invariant_to_scaling_the_context(fixtures):
    index = load_senses(fixtures / "kb" / "senses.tsv")
    rng = random.Random(3)
    vocab = ["node", "data", "heap", "oak", "leaf", "forest", "computer", "science", "botany", "river"]
    for _ in range(200):
        ctx = Counter({w: rng.randint(0, 3) for w in rng.sample(vocab, 4)})
        k = rng.randint(2, 5)
        scaled = Counter({w: c * k for w, c in ctx.items()})
        assert disambiguate("tree", index, ContextProfile(ctx))[0] == \
            disambiguate("tree", index, ContextProfile(scaled))[0]


def test_apply_senses_keeps_the_chosen_sense(fixtures):
    index = load_senses(fixtures / "kb" / "senses.tsv")
    triples = load_triples(fixtures / "kb" / "kb.tsv")
    ctx = ContextProfile.from_tokens(["oak", "tree"])
    kept = {(t.subject, t.relation, t.object) for t in apply_senses(triples, index, ctx)}
    assert ("tree", "isa", "plant") in kept
    assert ("tree", "isa", "structure") not in kept


def test_context_from_program():
    from caspr.parser import parse_program
    ctx = ContextProfile.from_program(parse_program("isa(oak, tree). event(break_down, engine)."),
                                      parse_query("event(grow, X)"))
    assert ctx.terms == Counter({"oak": 1, "tree": 1, "break": 1, "engine": 1, "grow": 1})
    assert ctx.count("oak_tree") == 1
    assert ctx.count("break_down") == 0  # "down" is a stop word


def test_relevance_hops():
    ts = parse_triples("ka\tisa\tkb\nkb\tisa\tkc\nkc\tisa\tkd\nkx\tisa\tky\n")
    ctx = ContextProfile.from_tokens(["ka"])
    assert {t.subject for t in relevant(ts, ctx, 1)} == {"ka"}
    assert {t.subject for t in relevant(ts, ctx, 2)} == {"ka", "kb"}
    with pytest.raises(ValueError):
        relevant(ts, ctx, 0)


def test_relevance_is_monotone_in_hops():
    rng = random.Random(11)
    nodes = [f"n{i}" for i in range(12)]
    for _ in range(100):
        ts = [ConceptTriple(rng.choice(nodes), "isa", rng.choice(nodes)) for _ in range(15)]
        ctx = ContextProfile.from_tokens(rng.sample(nodes, 2))
        prev = set()
        for h in range(1, 6):
            cur = set(relevant(ts, ctx, h))
            assert prev <= cur
            prev = cur


def test_isa_closure_matches_bfs():
    rng = random.Random(2)
    for _ in range(30):
        n = rng.randint(2, 7)
        nodes = [f"c{i}" for i in range(n)]
        edges = {(nodes[i], nodes[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.35}
        triples = [ConceptTriple(s, "isa", o) for s, o in edges]
        kb = compile_kb(triples, ContextProfile.from_tokens(nodes), hops=n + 1)
        for s in nodes:
            seen, todo = set(), deque([s])
            while todo:
                x = todo.popleft()
                for a, b in edges:
                    if a == x and b not in seen:
                        seen.add(b)
                        todo.append(b)
            got = {str(v) for b in answer_all(kb.program, parse_query(f"isa({s}, X)")) for v in b.values()}
            assert got == seen


def test_isa_cycles_warn():
    ts = parse_triples("ka\tisa\tkb\nkb\tisa\tka\n")
    assert isa_cycles(ts) == [["ka", "kb", "ka"]]
    with pytest.warns(KBWarning):
        compile_kb(ts, ContextProfile.from_tokens(["ka"]))


def test_property_inheritance(fixtures):
    triples = load_triples(fixtures / "kb" / "kb.tsv")
    from caspr.parser import parse_program
    passage = parse_program("isa(tweety, sparrow).")
    kb = compile_kb(triples, ContextProfile.from_program(passage), hops=3)
    assert [d.name for d in kb.defaults] == ["inh_bird_fly"]
    assert solve(passage + kb.program, parse_query("holds(tweety, fly)")).succeeded
    assert solve(passage + kb.program, parse_query("event(fly, tweety)")).succeeded


def test_irrelevant_kb_compiles_to_nothing():
    kb = compile_kb(parse_triples("a\tisa\tb\n"), ContextProfile.from_tokens(["zzz"]))
    assert kb.facts.rules == () and kb.defaults == []
