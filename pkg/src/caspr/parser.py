"""Reader and printer for the ASP subset: normal rules with classical negation.

Grammar::

    program  := statement*
    statement:= head ":-" body "." | head "." | ":-" body "."
    query    := "?-" body "."
    body     := blit ("," blit)*
    blit     := ["not"] ["-"] atom
    atom     := ident ["(" term ("," term)* ")"]
    term     := VAR | ident ["(" term ("," term)* ")"] | INT

``%`` starts a comment running to the end of the line.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .terms import (
    Atom,
    BodyLiteral,
    Compound,
    Constant,
    Integer,
    Literal,
    Program,
    Rule,
    Variable,
    variables,
)


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: str
    line: int
    column: int
    message: str
    token: str = ""

    def __str__(self):
        tok = f" (at {self.token!r})" if self.token else ""
        return f"{self.line}:{self.column}: {self.severity}: {self.message}{tok}"


class ParseError(ValueError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(map(str, self.diagnostics)))


@dataclass(frozen=True)
class Query:
    body: tuple
    free_variables: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(self.body))
        if not self.body:
            raise ValueError("a query needs at least one literal")
        if not self.free_variables:
            fv = [v for v in variables(Rule(None, self.body)) if v.name != "_" and not v.name.startswith("_")]
            object.__setattr__(self, "free_variables", tuple(fv))

    def is_ground(self) -> bool:
        return all(b.is_ground() for b in self.body)

    def __str__(self):
        return f"?- {', '.join(map(str, self.body))}."


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>%[^\n]*)
  | (?P<if>:-)
  | (?P<query>\?-)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<ident>[a-z][A-Za-z0-9_]*)
  | (?P<int>[0-9]+)
  | (?P<lpar>\()
  | (?P<rpar>\))
  | (?P<comma>,)
  | (?P<dot>\.)
  | (?P<minus>-)
    """,
    re.VERBOSE,
)


def _lex(text: str, diags: list) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            ch = text[pos]
            diags.append(ParseDiagnostic("error", line, col, "unexpected character", ch))
            toks.append(_Tok("bad", ch, line, col))
            pos += 1
            continue
        kind = m.lastgroup
        s = m.group()
        if kind not in ("ws", "comment"):
            if kind == "ident" and s == "not":
                kind = "not"
            toks.append(_Tok(kind, s, line, col))
        nl = s.count("\n")
        if nl:
            line += nl
            line_start = pos + s.rfind("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Fail(Exception):
    pass


class _Parser:
    def __init__(self, text: str):
        self.diags: list[ParseDiagnostic] = []
        self.toks = _lex(text, self.diags)
        self.i = 0
        self._anon = 0

    # -- token helpers
    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def error(self, msg: str, tok: Optional[_Tok] = None):
        tok = tok or self.tok
        self.diags.append(ParseDiagnostic("error", tok.line, tok.col, msg, tok.text))
        raise _Fail

    def expect(self, kind: str, what: str) -> _Tok:
        if self.tok.kind != kind:
            if self.tok.kind == "eof":
                self.error(f"unterminated statement: expected {what} before end of input")
            self.error(f"expected {what}")
        return self.advance()

    def recover(self):
        while self.tok.kind not in ("dot", "eof"):
            self.advance()
        self.advance()

    # -- grammar
    def term(self):
        t = self.tok
        if t.kind == "var":
            self.advance()
            if t.text == "_":
                self._anon += 1
                return Variable(f"_{self._anon}")
            if self.tok.kind == "lpar":
                self.error("functor names must start with a lowercase letter", t)
            return Variable(t.text)
        if t.kind == "int":
            self.advance()
            return Integer(int(t.text))
        if t.kind == "ident":
            self.advance()
            if self.tok.kind == "lpar":
                return Compound(t.text, self.args())
            return Constant(t.text)
        if t.kind == "not":
            self.error("'not' cannot be used as a term")
        self.error("expected a term")

    def args(self) -> tuple:
        self.expect("lpar", "'('")
        out = [self.term()]
        while self.tok.kind == "comma":
            self.advance()
            out.append(self.term())
        self.expect("rpar", "')' or ','")
        return tuple(out)

    def atom(self) -> Atom:
        t = self.tok
        if t.kind == "var":
            self.error("predicate names must start with a lowercase letter")
        if t.kind != "ident":
            self.error("expected an atom")
        self.advance()
        if self.tok.kind == "lpar":
            return Atom(t.text, self.args())
        return Atom(t.text)

    def literal(self) -> Literal:
        if self.tok.kind == "minus":
            self.advance()
            if self.tok.kind == "minus":
                self.error("doubled classical negation")
            return Literal(self.atom(), True)
        return Literal(self.atom(), False)

    def body_literal(self) -> BodyLiteral:
        if self.tok.kind == "not":
            self.advance()
            if self.tok.kind == "not":
                self.error("nested 'not' is not allowed")
            return BodyLiteral(self.literal(), True)
        return BodyLiteral(self.literal(), False)

    def body(self) -> tuple:
        out = [self.body_literal()]
        while self.tok.kind == "comma":
            self.advance()
            out.append(self.body_literal())
        return tuple(out)

    def statement(self) -> Rule:
        self._anon_scope()
        if self.tok.kind == "if":
            self.advance()
            body = self.body()
            self.expect("dot", "'.' to end the constraint")
            return Rule(None, body)
        if self.tok.kind == "not":
            self.error("'not' is not allowed in a rule head")
        if self.tok.kind == "query":
            self.error("queries are not allowed in a program")
        head = self.literal()
        if self.tok.kind == "if":
            self.advance()
            body = self.body()
        else:
            body = ()
        self.expect("dot", "'.' to end the rule")
        return Rule(head, body)

    def _anon_scope(self):
        # anonymous variables are numbered per statement
        self._anon = 0

    def program(self) -> tuple[list, list]:
        rules, lines = [], []
        while self.tok.kind != "eof":
            line = self.tok.line
            try:
                rules.append(self.statement())
                lines.append(line)
            except _Fail:
                self.recover()
        return rules, lines

    def query(self) -> Query:
        self._anon_scope()
        self.expect("query", "'?-'")
        if self.tok.kind in ("dot", "eof"):
            self.error("empty query")
        body = self.body()
        self.expect("dot", "'.' to end the query")
        if self.tok.kind != "eof":
            self.error("unexpected text after the query")
        return Query(body)


def parse_program(text: str, source: str = "<string>") -> Program:
    """Parse program text; raises :class:`ParseError` with every diagnostic found."""
    p = _Parser(text)
    rules, lines = p.program()
    if any(d.severity == "error" for d in p.diags):
        raise ParseError(p.diags)
    return Program(tuple(rules), tuple(f"{source}:{ln}" for ln in lines))


def parse_query(text: str) -> Query:
    text = text.strip()
    if not text.startswith("?-"):
        text = "?- " + text
    if not text.rstrip().endswith("."):
        text = text + "."
    p = _Parser(text)
    try:
        q = p.query()
    except _Fail:
        raise ParseError(p.diags) from None
    if p.diags:
        raise ParseError(p.diags)
    return q


def parse_rule(text: str) -> Rule:
    prog = parse_program(text)
    if len(prog.rules) != 1:
        raise ParseError([ParseDiagnostic("error", 1, 1, "expected exactly one rule")])
    return prog.rules[0]


def parse_literal(text: str) -> Literal:
    """Parse a single classical literal such as ``-flies(X)``."""
    p = _Parser(text)
    try:
        lit = p.literal()
        if p.tok.kind == "dot":
            p.advance()
        if p.tok.kind != "eof":
            p.error("unexpected text after the literal")
    except _Fail:
        raise ParseError(p.diags) from None
    if p.diags:
        raise ParseError(p.diags)
    return lit


def parse_body(text: str) -> tuple:
    p = _Parser(text)
    try:
        body = p.body()
        if p.tok.kind != "eof":
            p.error("unexpected text after the body")
    except _Fail:
        raise ParseError(p.diags) from None
    if p.diags:
        raise ParseError(p.diags)
    return body


def to_text(x: Union[Program, Query, Rule], provenance: bool = False) -> str:
    """Canonical text form; parsing it back yields an equal value."""
    if isinstance(x, Program):
        lines = []
        for r, prov in zip(x.rules, x.provenance):
            if provenance and prov:
                lines.append(f"% {prov}")
            lines.append(str(r))
        return "\n".join(lines) + ("\n" if lines else "")
    return str(x)


def load_program(path) -> Program:
    with open(path, encoding="utf-8") as fh:
        return parse_program(fh.read(), source=str(path))
