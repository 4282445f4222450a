"""SWRL-style rule text: ``Name: Atom ^ Atom ^ ... -> Atom``."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from ..terms import (
    BOOLEAN,
    CCPO,
    DECIMAL,
    INTEGER,
    IRI,
    LITERAL,
    RDF_TYPE,
    STRING,
    SWRLB,
    TAG_TO_XSD,
    VARIABLE,
    XSD_TYPES,
    PrefixTable,
    Term,
    TermError,
    iri,
    parse_lexical,
    var,
)

CLASS_ATOM = "class"
PROPERTY_ATOM = "property"
BUILTIN_ATOM = "builtin"

# arity of each supported builtin; arithmetic ones may bind their first argument
BUILTIN_ARITY = {
    "subtract": 3,
    "add": 3,
    "multiply": 3,
    "lessThan": 2,
    "lessThanOrEqual": 2,
    "greaterThan": 2,
    "greaterThanOrEqual": 2,
    "equal": 2,
    "notEqual": 2,
}
ARITHMETIC = ("subtract", "add", "multiply")


class RuleError(ValueError):
    def __init__(self, code: str, message: str, line: int = 0, column: int = 0):
        where = f" (line {line}, column {column})" if line else ""
        super().__init__(message + where)
        self.code = code
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Atom:
    kind: str
    predicate: Term
    args: tuple[Term, ...]

    @property
    def builtin(self) -> str | None:
        return self.predicate.value[len(SWRLB):] if self.kind == BUILTIN_ATOM else None

    def variables(self) -> list[str]:
        return [a.value for a in self.args if a.kind == VARIABLE]

    def as_triple(self) -> tuple[Term, Term, Term]:
        if self.kind == CLASS_ATOM:
            return (self.args[0], RDF_TYPE, self.predicate)
        if self.kind == PROPERTY_ATOM:
            return (self.args[0], self.predicate, self.args[1])
        raise TypeError("builtin atoms have no triple form")


@dataclass(frozen=True)
class Rule:
    name: str
    body: tuple[Atom, ...]
    head: Atom

    @property
    def is_reconciliation(self) -> bool:
        return self.name.startswith("recon:")

    def variables(self) -> list[str]:
        seen: list[str] = []
        for atom in (*self.body, self.head):
            for v in atom.variables():
                if v not in seen:
                    seen.append(v)
        return seen


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<arrow>->|→)
  | (?P<and>\^|∧)
  | (?P<var>\?[A-Za-z_]\w*)
  | (?P<iriref><[^<>"\s]*>)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<dtype>\^\^)
  | (?P<number>[+-]?(?:\d+\.\d+|\.\d+|\d+))
  | (?P<directive>@prefix\b|PREFIX\b)
  | (?P<name>[A-Za-z_][\w\-]*(?:\.[\w\-]+)*(?::[A-Za-z_][\w\-]*(?:\.[\w\-]+)*)?)
  | (?P<punct>[():,.])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Tok]:
    out: list[_Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        # '^^' must win over '^'
        if text.startswith("^^", pos):
            m = re.compile(r"\^\^").match(text, pos)
            kind = "dtype"
        else:
            m = _TOKEN_RE.match(text, pos)
            kind = m.lastgroup if m else None
        col = pos - line_start + 1
        if m is None:
            raise RuleError("syntax-error", f"unexpected character {text[pos]!r}", line, col)
        chunk = m.group()
        if kind not in ("ws", "comment"):
            out.append(_Tok(kind, chunk, line, col))
        if "\n" in chunk:
            line += chunk.count("\n")
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    out.append(_Tok("eof", "", line, pos - line_start + 1))
    return out


class _RuleParser:
    def __init__(self, text: str, prefixes: PrefixTable, default_ns: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.prefixes = prefixes
        self.default_ns = default_ns

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, message: str, tok: _Tok | None = None, code: str = "syntax-error"):
        tok = tok or self.tok
        raise RuleError(code, message, tok.line, tok.column)

    def take(self, kind: str, text: str | None = None) -> _Tok:
        tok = self.tok
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text or kind
            self.fail(f"expected {want!r}, found {tok.text or 'end of input'!r}")
        self.i += 1
        return tok

    def at(self, kind: str, text: str | None = None) -> bool:
        return self.tok.kind == kind and (text is None or self.tok.text == text)

    def resolve(self, tok: _Tok) -> Term:
        if tok.kind == "iriref":
            return iri(tok.text[1:-1])
        if ":" in tok.text:
            try:
                return iri(self.prefixes.expand(tok.text))
            except TermError as exc:
                self.fail(str(exc), tok, exc.code)
        return iri(self.default_ns + tok.text)

    def parse(self) -> list[tuple[Rule, _Tok]]:
        rules = []
        while not self.at("eof"):
            if self.at("directive"):
                self.directive()
                continue
            rules.append(self.rule())
        return rules

    def directive(self) -> None:
        sparql_style = self.take("directive").text == "PREFIX"
        name = self.take("name")
        self.take("punct", ":")
        ns = self.take("iriref")
        self.prefixes.bind(name.text, ns.text[1:-1])
        if not sparql_style:
            self.take("punct", ".")

    def rule(self) -> tuple[Rule, _Tok]:
        start = self.take("name")
        self.take("punct", ":")
        body = [self.atom()]
        while self.at("and"):
            self.i += 1
            body.append(self.atom())
        self.take("arrow")
        head_tok = self.tok
        head = self.atom()
        if head.kind == BUILTIN_ATOM:
            self.fail("a rule head cannot be a builtin", head_tok, "builtin-head")
        return Rule(start.text, tuple(body), head), start

    def atom(self) -> Atom:
        tok = self.tok
        if tok.kind not in ("name", "iriref"):
            self.fail(f"expected atom, found {tok.text or 'end of input'!r}")
        self.i += 1
        predicate = self.resolve(tok)
        self.take("punct", "(")
        args = [self.argument()]
        while self.at("punct", ","):
            self.i += 1
            args.append(self.argument())
        self.take("punct", ")")
        if predicate.value.startswith(SWRLB):
            name = predicate.value[len(SWRLB):]
            if name not in BUILTIN_ARITY:
                self.fail(f"unknown builtin swrlb:{name}", tok, "unknown-builtin")
            if len(args) != BUILTIN_ARITY[name]:
                self.fail(
                    f"swrlb:{name} takes {BUILTIN_ARITY[name]} arguments, got {len(args)}",
                    tok,
                    "builtin-arity-mismatch",
                )
            return Atom(BUILTIN_ATOM, predicate, tuple(args))
        if len(args) == 1:
            return Atom(CLASS_ATOM, predicate, tuple(args))
        if len(args) == 2:
            return Atom(PROPERTY_ATOM, predicate, tuple(args))
        self.fail(f"atom {tok.text} must have 1 or 2 arguments", tok, "arity-mismatch")

    def argument(self) -> Term:
        tok = self.tok
        self.i += 1
        if tok.kind == "var":
            return var(tok.text[1:])
        if tok.kind == "number":
            dtype = INTEGER if re.fullmatch(r"[+-]?\d+", tok.text) else DECIMAL
            return parse_lexical(tok.text, dtype)
        if tok.kind == "string":
            lexical = tok.text[1:-1].replace('\\"', '"').replace("\\\\", "\\")
            dtype = STRING
            if self.at("dtype"):
                self.i += 1
                dt_iri = self.resolve(self.take("name")).value
                if dt_iri not in XSD_TYPES:
                    self.fail(f"unsupported datatype <{dt_iri}>", tok, "malformed-literal")
                dtype = XSD_TYPES[dt_iri]
            try:
                return parse_lexical(lexical, dtype)
            except TermError as exc:
                self.fail(str(exc), tok, exc.code)
        if tok.kind == "name" and tok.text in ("true", "false"):
            return parse_lexical(tok.text, BOOLEAN)
        if tok.kind in ("name", "iriref"):
            return self.resolve(tok)
        self.i -= 1
        self.fail(f"expected argument, found {tok.text or 'end of input'!r}")


def check_safety(rule: Rule) -> None:
    """Every head variable must be bound by a body atom or a safe value-generating builtin."""
    bound: set[str] = set()
    for atom in rule.body:
        if atom.kind != BUILTIN_ATOM:
            bound.update(atom.variables())
    problems: list[str] = []
    pending = [a for a in rule.body if a.kind == BUILTIN_ATOM]
    progress = True
    while progress:
        progress = False
        for atom in list(pending):
            first, rest = atom.args[0], atom.args[1:]
            rest_vars = {a.value for a in rest if a.kind == VARIABLE}
            if atom.builtin in ARITHMETIC and rest_vars <= bound:
                if first.kind == VARIABLE:
                    bound.add(first.value)
                pending.remove(atom)
                progress = True
            elif atom.builtin not in ARITHMETIC and set(atom.variables()) <= bound:
                pending.remove(atom)
                progress = True
    for atom in pending:
        inputs = atom.args[1:] if atom.builtin in ARITHMETIC else atom.args
        missing = sorted({a.value for a in inputs if a.kind == VARIABLE} - bound)
        problems.append(f"builtin swrlb:{atom.builtin} has unbound inputs " + ", ".join("?" + m for m in missing))
    head_missing = [v for v in rule.head.variables() if v not in bound]
    if head_missing:
        problems.insert(0, "head variables unbound: " + ", ".join("?" + v for v in head_missing))
    if problems:
        raise RuleError("unsafe-rule", f"rule {rule.name} is unsafe: " + "; ".join(problems))


def _pred_key(atom: Atom) -> tuple[str, Term]:
    return (atom.kind, atom.predicate)


def check_termination(rules: Iterable[Rule]) -> None:
    """Reject rules whose builtin-computed head value can feed back into their own body."""
    rules = list(rules)
    edges: dict[tuple[str, Term], set[tuple[str, Term]]] = {}
    for rule in rules:
        for atom in rule.body:
            if atom.kind != BUILTIN_ATOM:
                edges.setdefault(_pred_key(atom), set()).add(_pred_key(rule.head))

    def reaches(src, targets) -> bool:
        seen, stack = set(), [src]
        while stack:
            node = stack.pop()
            if node in targets:
                return True
            if node not in seen:
                seen.add(node)
                stack.extend(edges.get(node, ()))
        return False

    for rule in rules:
        generated = {
            a.args[0].value
            for a in rule.body
            if a.kind == BUILTIN_ATOM and a.builtin in ARITHMETIC and a.args[0].kind == VARIABLE
        }
        plain = {v for a in rule.body if a.kind != BUILTIN_ATOM for v in a.variables()}
        if not (set(rule.head.variables()) & (generated - plain)):
            continue
        body_preds = {_pred_key(a) for a in rule.body if a.kind != BUILTIN_ATOM}
        if reaches(_pred_key(rule.head), body_preds):
            raise RuleError(
                "non-terminating",
                f"rule {rule.name} feeds a computed value back into its own inputs",
            )


def parse_rules(
    text: str,
    prefixes: PrefixTable | None = None,
    default_namespace: str = CCPO,
) -> list[Rule]:
    """Parse rule text into rules (file order), rejecting unsafe or non-terminating sets."""
    parser = _RuleParser(text, prefixes.copy() if prefixes is not None else PrefixTable(), default_namespace)
    parsed = parser.parse()
    names: set[str] = set()
    for rule, tok in parsed:
        if rule.name in names:
            raise RuleError("duplicate-rule", f"rule name {rule.name} used twice", tok.line, tok.column)
        names.add(rule.name)
        try:
            check_safety(rule)
        except RuleError as exc:
            raise RuleError(exc.code, str(exc), tok.line, tok.column) from None
    rules = [r for r, _ in parsed]
    check_termination(rules)
    return rules


def format_term(term: Term, prefixes: PrefixTable | None = None, default_namespace: str = CCPO) -> str:
    if term.kind == VARIABLE:
        return "?" + term.value
    if term.kind == IRI:
        local = term.value[len(default_namespace):]
        if term.value.startswith(default_namespace) and re.fullmatch(r"[A-Za-z_][\w\-]*", local):
            return local
        return (prefixes or PrefixTable()).compact(term.value)
    if term.kind == LITERAL:
        lexical = term.lexical_form()
        if term.datatype in (INTEGER, DECIMAL, BOOLEAN):
            return lexical
        if term.datatype == STRING:
            return '"' + lexical.replace("\\", "\\\\").replace('"', '\\"') + '"'
        return f'"{lexical}"^^' + (prefixes or PrefixTable()).compact(TAG_TO_XSD[term.datatype])
    raise TypeError(term)


def format_atom(atom: Atom, prefixes: PrefixTable | None = None, default_namespace: str = CCPO) -> str:
    args = ", ".join(format_term(a, prefixes, default_namespace) for a in atom.args)
    return f"{format_term(atom.predicate, prefixes, default_namespace)}({args})"


def format_rule(rule: Rule, prefixes: PrefixTable | None = None, default_namespace: str = CCPO) -> str:
    body = " ^ ".join(format_atom(a, prefixes, default_namespace) for a in rule.body)
    return f"{rule.name}: {body} -> {format_atom(rule.head, prefixes, default_namespace)}"
