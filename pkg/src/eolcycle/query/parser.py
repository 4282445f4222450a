"""Parser for the SELECT subset of SPARQL used by the competency questions."""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..terms import BOOLEAN, DECIMAL, INTEGER, RDF_TYPE, STRING, XSD_TYPES, PrefixTable, Term, TermError, iri, parse_lexical, var
from .ast import (
    And,
    Bound,
    Compare,
    Count,
    Filter,
    Group,
    Not,
    OptionalBlock,
    OrderKey,
    Or,
    Query,
    SubSelect,
    TermExpr,
    TriplePattern,
)

MAX_OPTIONAL_DEPTH = 2
MAX_SUBSELECT_DEPTH = 1

KEYWORDS = {
    "SELECT", "DISTINCT", "WHERE", "OPTIONAL", "FILTER", "PREFIX", "GROUP", "BY",
    "ORDER", "ASC", "DESC", "LIMIT", "OFFSET", "COUNT", "AS", "BOUND",
}


class QueryError(ValueError):
    def __init__(self, code: str, message: str, line: int = 0, column: int = 0):
        where = f" (line {line}, column {column})" if line else ""
        super().__init__(message + where)
        self.code = code
        self.line = line
        self.column = column


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<var>[?$][A-Za-z_]\w*)
  | (?P<iriref><[^<>"{}|^`\\\s]*>)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<dtype>\^\^)
  | (?P<number>[+-]?(?:\d+\.\d+|\.\d+|\d+))
  | (?P<op><=|>=|!=|&&|\|\||[=<>!])
  | (?P<pname>[A-Za-z_][\w\-]*(?:\.[\w\-]+)*:(?:[\w\-]+(?:\.[\w\-]+)*)?|:[\w\-]+)
  | (?P<word>[A-Za-z_]\w*)
  | (?P<punct>[{}().,;*])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    column: int

    @property
    def upper(self) -> str:
        return self.text.upper() if self.kind == "word" else ""


def _tokenize(text: str) -> list[_Tok]:
    out: list[_Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise QueryError("syntax-error", f"unexpected character {text[pos]!r}", line, col)
        chunk = m.group()
        if m.lastgroup not in ("ws", "comment"):
            out.append(_Tok(m.lastgroup, chunk, line, col))
        if "\n" in chunk:
            line += chunk.count("\n")
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    out.append(_Tok("eof", "", line, pos - line_start + 1))
    return out


class _Parser:
    def __init__(self, text: str, prefixes: PrefixTable):
        self.toks = _tokenize(text)
        self.i = 0
        self.prefixes = prefixes
        self.optional_depth = 0
        self.select_depth = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, message: str, tok: _Tok | None = None, code: str = "syntax-error"):
        tok = tok or self.tok
        raise QueryError(code, message, tok.line, tok.column)

    def found(self) -> str:
        return repr(self.tok.text) if self.tok.kind != "eof" else "end of input"

    def keyword(self, word: str) -> bool:
        if self.tok.upper == word:
            self.i += 1
            return True
        return False

    def expect_keyword(self, word: str) -> None:
        if not self.keyword(word):
            self.fail(f"expected {word}, found {self.found()}")

    def punct(self, char: str) -> bool:
        if self.tok.kind == "punct" and self.tok.text == char:
            self.i += 1
            return True
        return False

    def expect_punct(self, char: str) -> None:
        if not self.punct(char):
            self.fail(f"expected {char!r}, found {self.found()}")

    # -- top level ------------------------------------------------------

    def parse(self) -> Query:
        while self.tok.upper == "PREFIX":
            self.i += 1
            tok = self.tok
            if tok.kind != "pname" or not tok.text.endswith(":"):
                self.fail("expected prefix name ending in ':'")
            self.i += 1
            ns = self.tok
            if ns.kind != "iriref":
                self.fail("expected <namespace IRI>")
            self.i += 1
            self.prefixes.bind(tok.text[:-1], ns.text[1:-1])
        start = self.tok
        query = self.select()
        if self.tok.kind != "eof":
            self.fail(f"unexpected {self.found()} after query")
        self.check_projection(query, start)
        return query

    def select(self) -> Query:
        self.expect_keyword("SELECT")
        self.select_depth += 1
        distinct = self.keyword("DISTINCT")
        projection: list = []
        star = False
        if self.punct("*"):
            star = True
        else:
            while True:
                if self.tok.kind == "var":
                    projection.append(self.next().text[1:])
                elif self.tok.kind == "punct" and self.tok.text == "(":
                    projection.append(self.aggregate())
                else:
                    break
            if not projection:
                self.fail(f"expected projection, found {self.found()}")
        self.keyword("WHERE")
        where = self.group()
        query = Query(projection, where, star=star, distinct=distinct)
        if self.keyword("GROUP"):
            self.expect_keyword("BY")
            while self.tok.kind == "var":
                query.group_by.append(self.next().text[1:])
            if not query.group_by:
                self.fail("GROUP BY needs at least one variable")
        if self.keyword("ORDER"):
            self.expect_keyword("BY")
            while True:
                if self.tok.upper in ("ASC", "DESC"):
                    desc = self.next().upper == "DESC"
                    self.expect_punct("(")
                    v = self.variable()
                    self.expect_punct(")")
                    query.order_by.append(OrderKey(v, desc))
                elif self.tok.kind == "var":
                    query.order_by.append(OrderKey(self.next().text[1:]))
                else:
                    break
            if not query.order_by:
                self.fail("ORDER BY needs at least one key")
        while self.tok.upper in ("LIMIT", "OFFSET"):
            which = self.next().upper
            tok = self.tok
            if tok.kind != "number" or not tok.text.isdigit():
                self.fail(f"{which} needs a non-negative integer")
            self.i += 1
            if which == "LIMIT":
                query.limit = int(tok.text)
            else:
                query.offset = int(tok.text)
        self.select_depth -= 1
        return query

    def next(self) -> _Tok:
        tok = self.tok
        self.i += 1
        return tok

    def variable(self) -> str:
        if self.tok.kind != "var":
            self.fail(f"expected variable, found {self.found()}")
        return self.next().text[1:]

    def aggregate(self) -> Count:
        self.expect_punct("(")
        self.expect_keyword("COUNT")
        self.expect_punct("(")
        distinct = self.keyword("DISTINCT")
        target = None if self.punct("*") else self.variable()
        self.expect_punct(")")
        self.expect_keyword("AS")
        alias = self.variable()
        self.expect_punct(")")
        return Count(target, alias, distinct)

    def check_projection(self, query: Query, tok: _Tok) -> None:
        available = set(query.where.variables())
        aliases = {a.alias for a in query.aggregates}
        for p in query.projection:
            if isinstance(p, Count):
                if p.var is not None and p.var not in available:
                    self.fail(f"COUNT over unused variable ?{p.var}", tok, "projection-of-unused-variable")
            elif p not in available and p not in aliases:
                self.fail(f"?{p} is projected but never used in WHERE", tok, "projection-of-unused-variable")
        for g in query.group_by:
            if g not in available:
                self.fail(f"GROUP BY ?{g} is not bound in WHERE", tok, "projection-of-unused-variable")
        if query.aggregates or query.group_by:
            for p in query.projection:
                if isinstance(p, str) and p not in query.group_by:
                    self.fail(f"?{p} must appear in GROUP BY", tok, "non-grouped-projection")

    # -- graph patterns -------------------------------------------------

    def group(self) -> Group:
        self.expect_punct("{")
        group = Group()
        while not self.punct("}"):
            tok = self.tok
            if tok.kind == "eof":
                self.fail("unterminated group: expected '}'")
            if tok.upper == "OPTIONAL":
                self.i += 1
                self.optional_depth += 1
                if self.optional_depth > MAX_OPTIONAL_DEPTH:
                    self.fail("OPTIONAL blocks nest at most 2 deep", tok, "nesting-too-deep")
                group.elements.append(OptionalBlock(self.group()))
                self.optional_depth -= 1
            elif tok.upper == "FILTER":
                self.i += 1
                self.expect_punct("(")
                expr = self.expr()
                self.expect_punct(")")
                group.elements.append(Filter(expr))
            elif tok.kind == "punct" and tok.text == "{":
                # only sub-selects may appear as nested groups
                if self.toks[self.i + 1].upper != "SELECT":
                    self.fail("nested groups must be sub-selects")
                self.i += 1
                if self.select_depth > MAX_SUBSELECT_DEPTH:
                    self.fail("sub-selects nest at most 1 deep", tok, "nesting-too-deep")
                sub = self.select()
                self.check_projection(sub, tok)
                self.expect_punct("}")
                group.elements.append(SubSelect(sub))
            else:
                group.elements.extend(self.triples())
            self.punct(".")
        return group

    def triples(self) -> list[TriplePattern]:
        subject = self.node(allow_literal=False)
        out = []
        while True:
            if self.tok.kind == "word" and self.tok.text == "a":
                self.i += 1
                predicate = RDF_TYPE
            else:
                predicate = self.node(allow_literal=False)
            while True:
                out.append(TriplePattern(subject, predicate, self.node(allow_literal=True)))
                if not self.punct(","):
                    break
            if self.punct(";"):
                if self.tok.kind == "punct" and self.tok.text in ".}":
                    break
                continue
            break
        return out

    def node(self, allow_literal: bool) -> Term:
        tok = self.tok
        if tok.kind == "var":
            self.i += 1
            return var(tok.text[1:])
        if tok.kind == "iriref":
            self.i += 1
            return iri(tok.text[1:-1])
        if tok.kind == "pname":
            self.i += 1
            try:
                return iri(self.prefixes.expand(tok.text))
            except TermError as exc:
                self.fail(str(exc), tok, exc.code)
        if allow_literal:
            lit = self.literal()
            if lit is not None:
                return lit
        self.fail(f"expected term, found {self.found()}")

    def literal(self) -> Term | None:
        tok = self.tok
        try:
            if tok.kind == "number":
                self.i += 1
                dtype = INTEGER if re.fullmatch(r"[+-]?\d+", tok.text) else DECIMAL
                return parse_lexical(tok.text, dtype)
            if tok.kind == "word" and tok.text in ("true", "false"):
                self.i += 1
                return parse_lexical(tok.text, BOOLEAN)
            if tok.kind == "string":
                self.i += 1
                lexical = re.sub(r"\\(.)", lambda m: {"n": "\n", "t": "\t"}.get(m.group(1), m.group(1)), tok.text[1:-1])
                dtype = STRING
                if self.tok.kind == "dtype":
                    self.i += 1
                    dt = self.node(allow_literal=False)
                    if dt.value not in XSD_TYPES:
                        self.fail(f"unsupported datatype <{dt.value}>", tok, "malformed-literal")
                    dtype = XSD_TYPES[dt.value]
                return parse_lexical(lexical, dtype)
        except TermError as exc:
            self.fail(str(exc), tok, exc.code)
        return None

    # -- filter expressions ---------------------------------------------

    def expr(self):
        left = self.conjunction()
        while self.tok.kind == "op" and self.tok.text == "||":
            self.i += 1
            left = Or(left, self.conjunction())
        return left

    def conjunction(self):
        left = self.comparison()
        while self.tok.kind == "op" and self.tok.text == "&&":
            self.i += 1
            left = And(left, self.comparison())
        return left

    def comparison(self):
        left = self.unary()
        if self.tok.kind == "op" and self.tok.text in ("=", "!=", "<", "<=", ">", ">="):
            op = self.next().text
            return Compare(op, left, self.unary())
        return left

    def unary(self):
        tok = self.tok
        if tok.kind == "op" and tok.text == "!":
            self.i += 1
            return Not(self.unary())
        if self.punct("("):
            inner = self.expr()
            self.expect_punct(")")
            return inner
        if tok.upper == "BOUND":
            self.i += 1
            self.expect_punct("(")
            v = self.variable()
            self.expect_punct(")")
            return Bound(v)
        return TermExpr(self.node(allow_literal=True))


def parse_query(text: str, prefixes: PrefixTable | None = None) -> Query:
    """Parse query text; the result carries the prefix table as ``query.prefixes``."""
    table = prefixes.copy() if prefixes is not None else PrefixTable()
    parser = _Parser(text, table)
    query = parser.parse()
    query.prefixes = table
    return query
