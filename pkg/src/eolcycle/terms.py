"""Terms: IRIs, typed literals and variables, plus the prefix table."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from decimal import Decimal, InvalidOperation
from typing import Any

RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
XSD = "http://www.w3.org/2001/XMLSchema#"
PROV = "http://www.w3.org/ns/prov#"
CCPO = "http://example.org/ccpo#"
DICBM = "http://example.org/dicbm#"
CCO = "http://www.ontologyrepository.com/CommonCoreOntologies/"
SWRLB = "http://www.w3.org/2003/11/swrlb#"

DEFAULT_PREFIXES = {
    "rdf": RDF,
    "rdfs": RDFS,
    "xsd": XSD,
    "prov": PROV,
    "ccpo": CCPO,
    "dicbm": DICBM,
    "cco": CCO,
    "swrlb": SWRLB,
}

IRI = "iri"
LITERAL = "literal"
VARIABLE = "variable"

STRING = "string"
DECIMAL = "decimal"
INTEGER = "integer"
BOOLEAN = "boolean"
TIMESTAMP = "timestamp"
DATATYPES = (STRING, DECIMAL, INTEGER, BOOLEAN, TIMESTAMP)
NUMERIC = (INTEGER, DECIMAL)

# xsd datatype IRI <-> datatype tag
XSD_TYPES = {
    XSD + "string": STRING,
    XSD + "decimal": DECIMAL,
    XSD + "double": DECIMAL,
    XSD + "float": DECIMAL,
    XSD + "integer": INTEGER,
    XSD + "int": INTEGER,
    XSD + "boolean": BOOLEAN,
    XSD + "dateTime": TIMESTAMP,
    XSD + "date": TIMESTAMP,
}
TAG_TO_XSD = {
    STRING: XSD + "string",
    DECIMAL: XSD + "decimal",
    INTEGER: XSD + "integer",
    BOOLEAN: XSD + "boolean",
    TIMESTAMP: XSD + "dateTime",
}


class TermError(ValueError):
    """Raised for malformed literals and unresolvable names."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class Term:
    kind: str
    value: Any
    datatype: str | None = None
    # original lexical form of a literal; not part of identity
    lexical: str | None = field(default=None, compare=False, hash=False)

    def __repr__(self) -> str:
        if self.kind == IRI:
            return f"<{self.value}>"
        if self.kind == VARIABLE:
            return f"?{self.value}"
        return f"{self.lexical_form()!r}^^{self.datatype}"

    @property
    def is_iri(self) -> bool:
        return self.kind == IRI

    @property
    def is_literal(self) -> bool:
        return self.kind == LITERAL

    @property
    def is_variable(self) -> bool:
        return self.kind == VARIABLE

    @property
    def is_numeric(self) -> bool:
        return self.kind == LITERAL and self.datatype in NUMERIC

    def lexical_form(self) -> str:
        if self.kind != LITERAL:
            return str(self.value)
        if self.lexical is not None:
            return self.lexical
        return canonical_lexical(self.datatype, self.value)

    def sort_key(self) -> tuple:
        """Canonical ordering key: IRIs before literals, literals by type then form."""
        if self.kind == IRI:
            return (0, "", self.value)
        if self.kind == LITERAL:
            return (1, self.datatype, canonical_lexical(self.datatype, self.value))
        return (2, "", self.value)


def iri(value: str) -> Term:
    return Term(IRI, value)


def var(name: str) -> Term:
    return Term(VARIABLE, name.lstrip("?"))


def literal(value: Any, datatype: str | None = None) -> Term:
    """Build a literal from a Python value, inferring the datatype when omitted."""
    if datatype is None:
        if isinstance(value, bool):
            datatype = BOOLEAN
        elif isinstance(value, int):
            datatype = INTEGER
        elif isinstance(value, (float, Decimal)):
            datatype = DECIMAL
        elif isinstance(value, datetime):
            datatype = TIMESTAMP
        else:
            datatype = STRING
    if datatype == DECIMAL and not isinstance(value, Decimal):
        value = Decimal(str(value))
    if datatype == TIMESTAMP and isinstance(value, datetime):
        value = _normalize_dt(value)
    if datatype == INTEGER and (isinstance(value, bool) or not isinstance(value, int)):
        raise TermError("malformed-literal", f"not an integer: {value!r}")
    return Term(LITERAL, value, datatype)


def canonical_lexical(datatype: str | None, value: Any) -> str:
    if datatype == BOOLEAN:
        return "true" if value else "false"
    if datatype == TIMESTAMP:
        return value.strftime("%Y-%m-%dT%H:%M:%S") + ("Z" if value.tzinfo else "")
    if datatype == DECIMAL:
        text = format(value, "f")
        return text if "." in text else text + ".0"
    return str(value)


_INT_RE = re.compile(r"[+-]?\d+\Z")
_DEC_RE = re.compile(r"[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?\Z")


def _normalize_dt(value: datetime) -> datetime:
    # aware timestamps are kept in UTC; naive ones are read as UTC
    if value.tzinfo is None:
        return value.replace(tzinfo=timezone.utc)
    return value.astimezone(timezone.utc)


def parse_timestamp(text: str) -> datetime:
    """ISO-8601 with a required date and optional time."""
    raw = text.strip()
    if raw.endswith("Z"):
        raw = raw[:-1] + "+00:00"
    try:
        if len(raw) == 10:
            value = datetime.strptime(raw, "%Y-%m-%d")
        else:
            value = datetime.fromisoformat(raw)
    except ValueError:
        raise TermError("malformed-literal", f"bad timestamp: {text!r}") from None
    return _normalize_dt(value)


def parse_lexical(lexical: str, datatype: str) -> Term:
    """Turn a lexical form plus datatype tag into a literal term."""
    if datatype == STRING:
        return Term(LITERAL, lexical, STRING, lexical)
    if datatype == INTEGER:
        if not _INT_RE.match(lexical):
            raise TermError("malformed-literal", f"bad integer: {lexical!r}")
        return Term(LITERAL, int(lexical), INTEGER, lexical)
    if datatype == DECIMAL:
        if not _DEC_RE.match(lexical):
            raise TermError("malformed-literal", f"bad decimal: {lexical!r}")
        try:
            return Term(LITERAL, Decimal(lexical), DECIMAL, lexical)
        except InvalidOperation:
            raise TermError("malformed-literal", f"bad decimal: {lexical!r}") from None
    if datatype == BOOLEAN:
        if lexical in ("true", "1"):
            return Term(LITERAL, True, BOOLEAN, lexical)
        if lexical in ("false", "0"):
            return Term(LITERAL, False, BOOLEAN, lexical)
        raise TermError("malformed-literal", f"bad boolean: {lexical!r}")
    if datatype == TIMESTAMP:
        return Term(LITERAL, parse_timestamp(lexical), TIMESTAMP, lexical)
    raise TermError("malformed-literal", f"unknown datatype {datatype!r}")


class PrefixTable:
    """Maps prefixes to namespace IRIs and back."""

    def __init__(self, prefixes: dict[str, str] | None = None):
        self._ns: dict[str, str] = dict(DEFAULT_PREFIXES if prefixes is None else prefixes)

    def __contains__(self, prefix: str) -> bool:
        return prefix in self._ns

    def __iter__(self):
        return iter(self._ns.items())

    def as_dict(self) -> dict[str, str]:
        return dict(self._ns)

    def bind(self, prefix: str, namespace: str) -> None:
        self._ns[prefix] = namespace

    def copy(self) -> PrefixTable:
        return PrefixTable(self._ns)

    def expand(self, pname: str) -> str:
        prefix, _, local = pname.partition(":")
        if prefix not in self._ns:
            raise TermError("unknown-prefix", f"unknown prefix {prefix!r} in {pname!r}")
        return self._ns[prefix] + local

    def compact(self, value: str) -> str:
        best = None
        for prefix, ns in self._ns.items():
            if value.startswith(ns) and (best is None or len(ns) > len(best[1])):
                best = (prefix, ns)
        if best is None:
            return f"<{value}>"
        local = value[len(best[1]):]
        if not re.fullmatch(r"[A-Za-z_][\w.\-]*", local) or local.endswith("."):
            return f"<{value}>"
        return f"{best[0]}:{local}"


def shorten(term: Term | None, prefixes: PrefixTable | None = None) -> str:
    """Compact display form: prefixed name for IRIs, bare lexical for literals."""
    if term is None:
        return ""
    if term.kind == IRI:
        return (prefixes or PrefixTable()).compact(term.value)
    if term.kind == VARIABLE:
        return "?" + term.value
    return term.lexical_form()


RDF_TYPE = iri(RDF + "type")
TRUE = literal(True)
FALSE = literal(False)
