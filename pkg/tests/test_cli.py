import io
import json

import pytest

from caspr.cli import Repl, main
from caspr.parser import load_program


def cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_human_and_json_agree(capsys, fixtures):
    prog = str(fixtures / "tweety.lp")
    code, text, _ = cli(capsys, "solve", "--program", prog, "--query", "flies(X)", "--all")
    assert code == 0 and text.splitlines() == ["yes", "X = tweety"]
    code, text, _ = cli(capsys, "solve", "--program", prog, "--query", "flies(X)", "--all", "--json")
    data = json.loads(text)
    assert data["status"] == "success"
    assert [a["bindings"] for a in data["answers"]] == [{"X": "tweety"}]


def test_solve_justify_and_trace(capsys, fixtures):
    code, text, _ = cli(capsys, "solve", "--program", str(fixtures / "tweety.lp"),
                        "--query", "flies(tweety)", "--justify", "--trace")
    assert "1\tcall\tflies(tweety)" in text
    assert "not ab(tweety)  [assumed]" in text


def test_oracle_engine(capsys, fixtures):
    code, text, _ = cli(capsys, "solve", "--program", str(fixtures / "pq.lp"), "--query", "p",
                        "--engine", "oracle")
    assert code == 0 and text.startswith("yes")


def test_models(capsys, fixtures):
    code, text, _ = cli(capsys, "models", "--program", str(fixtures / "pq.lp"))
    assert text.splitlines() == ["{p}", "{q}"]
    code, text, _ = cli(capsys, "models", "--program", str(fixtures / "pq.lp"), "--max", "1", "--json")
    assert json.loads(text) == {"models": [["p"]]}


def test_exit_codes(capsys, tmp_path, fixtures):
    bad = tmp_path / "bad.lp"
    bad.write_text("p(X) :- not not q.\n")
    code, _, err = cli(capsys, "solve", "--program", str(bad), "--query", "p")
    assert code == 1 and "nested 'not'" in err
    code, _, _ = cli(capsys, "solve", "--program", str(fixtures / "tweety.lp"), "--query", "not bird(X)")
    assert code == 1
    with pytest.raises(SystemExit) as e:
        main(["solve"])
    assert e.value.code == 2


def test_ingest(capsys, tmp_path, fixtures):
    out = tmp_path / "train.lp"
    code, text, _ = cli(capsys, "ingest", "--triples", str(fixtures / "qa" / "train" / "passage.tsv"),
                        "--out", str(out))
    assert code == 0 and "coverage 3/4" in text
    assert [str(r) for r in load_program(out).rules] == ["event(break_down, engine).", "part_of(engine, train)."]


def test_qa_and_score(capsys, tmp_path, fixtures):
    d = fixtures / "qa" / "penguin"
    kb = fixtures / "kb"
    report = tmp_path / "report.csv"
    code, text, _ = cli(capsys, "qa", "--facts", str(d / "passage.tsv"), "--kb-triples", str(kb / "kb.tsv"),
                        "--senses", str(kb / "senses.tsv"), "--defaults", str(kb / "birds.defaults"),
                        "--questions", str(d / "questions.tsv"), "--gold", str(d / "gold.tsv"),
                        "--report", str(report), "--json")
    data = json.loads(text)
    assert code == 0 and (data["correct"], data["count"]) == (2, 2)
    assert report.read_text().count("\n") == 3
    code, text, _ = cli(capsys, "score", "--results", str(fixtures / "table1.csv"))
    assert text.splitlines()[-2].split()[-1] == "78.95"
    assert text.splitlines()[-1].split()[-1] == "77.76"


def test_repl_matches_solve(capsys, monkeypatch, fixtures):
    prog = str(fixtures / "tweety.lp")
    monkeypatch.setattr("sys.stdin", io.StringIO("flies(X)\n:assert penguin(tweety).\nflies(X)\n:quit\n"))
    assert main(["repl", "--program", prog]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines == ["yes", "X = tweety", "added 1 rule(s)", "no"]
    _, text, _ = cli(capsys, "solve", "--program", prog, "--query", "flies(X)")
    assert text.splitlines() == lines[:2]


def test_repl_commands(fixtures):
    r = Repl(load_program(fixtures / "pq.lp"))
    assert r.handle(":quit") is None
    assert r.handle("") == ""
    assert r.handle(":load " + str(fixtures / "tweety.lp")).startswith("loaded")
    assert r.handle(":bogus").startswith("unknown command")
    assert r.handle("flies(tweety)").startswith("yes  (oracle fallback")
