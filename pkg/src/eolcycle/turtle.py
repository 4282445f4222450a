"""A small Turtle subset: prefixes, ``;``/``,`` continuation, typed literals, comments.

No blank nodes, collections or base-IRI resolution.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from .graph import Fact, Graph
from .terms import (
    BOOLEAN,
    DECIMAL,
    INTEGER,
    IRI,
    RDF_TYPE,
    STRING,
    TAG_TO_XSD,
    XSD_TYPES,
    PrefixTable,
    Term,
    TermError,
    iri,
    parse_lexical,
)


class ParseError(ValueError):
    def __init__(self, code: str, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{message} (line {line}, column {column})" if line else message)
        self.code = code
        self.line = line
        self.column = column


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<iriref><[^<>"{}|^`\\\s]*>)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<dtype>\^\^)
  | (?P<number>[+-]?(?:\d+\.\d+|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<directive>@prefix\b|PREFIX\b)
  | (?P<pname>[A-Za-z_][\w\-]*(?:\.[\w\-]+)*:(?:[\w\-]+(?:\.[\w\-]+)*)?|:[\w\-]+(?:\.[\w\-]+)*)
  | (?P<name>[A-Za-z_][\w\-]*)
  | (?P<punct>[.;,])
    """,
    re.VERBOSE,
)

_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", '"': '"', "\\": "\\", "'": "'"}


@dataclass
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError("syntax-error", f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, chunk, line, col))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


def unescape(body: str) -> str:
    return re.sub(r"\\(.)", lambda m: _ESCAPES.get(m.group(1), m.group(1)), body)


class _Parser:
    def __init__(self, text: str, prefixes: PrefixTable):
        self.tokens = tokenize(text)
        self.i = 0
        self.prefixes = prefixes

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def fail(self, message: str, tok: Token | None = None, code: str = "syntax-error"):
        tok = tok or self.tok
        raise ParseError(code, message, tok.line, tok.column)

    def next(self) -> Token:
        tok = self.tok
        self.i += 1
        return tok

    def expect_punct(self, char: str) -> None:
        if self.tok.kind != "punct" or self.tok.text != char:
            found = self.tok.text or "end of input"
            self.fail(f"expected {char!r}, found {found!r}")
        self.i += 1

    def resolve(self, tok: Token) -> Term:
        if tok.kind == "iriref":
            return iri(tok.text[1:-1])
        try:
            return iri(self.prefixes.expand(tok.text))
        except TermError as exc:
            self.fail(str(exc), tok, exc.code)

    def parse(self) -> list[Fact]:
        facts: list[Fact] = []
        while self.tok.kind != "eof":
            if self.tok.kind == "directive":
                self.directive()
            else:
                facts.extend(self.statement())
        return facts

    def directive(self) -> None:
        sparql_style = self.next().text == "PREFIX"
        tok = self.next()
        if tok.kind != "pname" or not tok.text.endswith(":"):
            self.fail("expected prefix name ending in ':'", tok)
        ns = self.next()
        if ns.kind != "iriref":
            self.fail("expected <namespace IRI>", ns)
        self.prefixes.bind(tok.text[:-1], ns.text[1:-1])
        if not sparql_style:
            self.expect_punct(".")

    def statement(self) -> list[Fact]:
        subject = self.subject_term()
        facts = []
        while True:
            predicate = self.predicate_term()
            while True:
                facts.append(Fact(subject, predicate, self.object_term()))
                if self.tok.kind == "punct" and self.tok.text == ",":
                    self.i += 1
                    continue
                break
            if self.tok.kind == "punct" and self.tok.text == ";":
                self.i += 1
                # trailing ';' before '.' is allowed
                if self.tok.kind == "punct" and self.tok.text == ".":
                    break
                continue
            break
        self.expect_punct(".")
        return facts

    def subject_term(self) -> Term:
        tok = self.next()
        if tok.kind not in ("pname", "iriref"):
            self.fail("expected subject IRI", tok)
        return self.resolve(tok)

    def predicate_term(self) -> Term:
        tok = self.next()
        if tok.kind == "name" and tok.text == "a":
            return RDF_TYPE
        if tok.kind not in ("pname", "iriref"):
            self.fail("expected predicate IRI", tok)
        return self.resolve(tok)

    def object_term(self) -> Term:
        tok = self.tok
        if tok.kind in ("pname", "iriref"):
            self.i += 1
            return self.resolve(tok)
        if tok.kind == "string":
            self.i += 1
            lexical = unescape(tok.text[1:-1])
            datatype = STRING
            if self.tok.kind == "dtype":
                self.i += 1
                dt_tok = self.next()
                if dt_tok.kind not in ("pname", "iriref"):
                    self.fail("expected datatype IRI", dt_tok)
                dt_iri = self.resolve(dt_tok).value
                if dt_iri not in XSD_TYPES:
                    self.fail(f"unsupported datatype {dt_tok.text}", dt_tok, "malformed-literal")
                datatype = XSD_TYPES[dt_iri]
            try:
                return parse_lexical(lexical, datatype)
            except TermError as exc:
                self.fail(str(exc), tok, exc.code)
        if tok.kind == "number":
            self.i += 1
            text = tok.text
            datatype = INTEGER if re.fullmatch(r"[+-]?\d+", text) else DECIMAL
            try:
                return parse_lexical(text, datatype)
            except TermError as exc:
                self.fail(str(exc), tok, exc.code)
        if tok.kind == "name" and tok.text in ("true", "false"):
            self.i += 1
            return parse_lexical(tok.text, BOOLEAN)
        found = tok.text or "end of input"
        self.fail(f"expected object term, found {found!r}")


def parse_data(text: str, prefixes: PrefixTable | None = None) -> tuple[list[Fact], PrefixTable]:
    """Parse Turtle-subset text into asserted facts (file order) and the prefix table."""
    table = prefixes.copy() if prefixes is not None else PrefixTable()
    parser = _Parser(text, table)
    return parser.parse(), table


def format_term(term: Term, prefixes: PrefixTable) -> str:
    if term.kind == IRI:
        if term == RDF_TYPE:
            return "a"
        return prefixes.compact(term.value)
    lexical = term.lexical_form()
    if term.datatype == STRING:
        escaped = lexical.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        return f'"{escaped}"'
    if term.datatype == BOOLEAN:
        return lexical
    return f'"{lexical}"^^{prefixes.compact(TAG_TO_XSD[term.datatype])}'


def export(facts: Iterable[Fact] | Graph, prefixes: PrefixTable | None = None) -> str:
    """Serialize facts as Turtle-subset text grouped by subject."""
    if isinstance(facts, Graph):
        prefixes = prefixes or facts.prefixes
        facts = facts.facts()
    prefixes = prefixes or PrefixTable()
    lines = [f"@prefix {p}: <{ns}> ." for p, ns in sorted(prefixes)]
    lines.append("")
    by_subject: dict[Term, list[Fact]] = {}
    for f in sorted(facts, key=Fact.sort_key):
        by_subject.setdefault(f.subject, []).append(f)
    for subject, group in by_subject.items():
        parts = [f"{format_term(f.predicate, prefixes)} {format_term(f.object, prefixes)}" for f in group]
        lines.append(format_term(subject, prefixes) + " " + " ;\n    ".join(parts) + " .")
    return "\n".join(lines) + "\n"
