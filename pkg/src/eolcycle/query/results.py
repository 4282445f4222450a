"""Result-table serialization: TSV, SPARQL-style JSON, and an aligned terminal table."""

from __future__ import annotations

import json

from ..terms import IRI, TAG_TO_XSD, PrefixTable, Term, shorten
from .evaluate import ResultTable

FORMATS = ("tsv", "json", "pretty")
JSON_VERSION = 1


def _cell(term: Term | None, prefixes: PrefixTable | None) -> str:
    text = shorten(term, prefixes)
    return text.replace("\t", " ").replace("\n", " ")


def to_tsv(table: ResultTable, prefixes: PrefixTable | None = None) -> str:
    lines = ["\t".join("?" + h for h in table.header)]
    for row in table.rows:
        lines.append("\t".join(_cell(t, prefixes) for t in row))
    return "\n".join(lines) + "\n"


def term_json(term: Term) -> dict:
    if term.kind == IRI:
        return {"type": "uri", "value": term.value}
    return {"type": "literal", "value": term.lexical_form(), "datatype": TAG_TO_XSD[term.datatype]}


def to_json(table: ResultTable) -> str:
    bindings = []
    for row in table.rows:
        # unbound cells are omitted from the binding object
        bindings.append({h: term_json(t) for h, t in zip(table.header, row) if t is not None})
    doc = {
        "version": JSON_VERSION,
        "head": {"vars": list(table.header)},
        "results": {"bindings": bindings},
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def to_pretty(table: ResultTable, prefixes: PrefixTable | None = None) -> str:
    header = ["?" + h for h in table.header]
    body = [[_cell(t, prefixes) for t in row] for row in table.rows]
    widths = [max([len(h)] + [len(r[i]) for r in body]) for i, h in enumerate(header)]
    rule = "+" + "+".join("-" * (w + 2) for w in widths) + "+"

    def line(cells):
        return "| " + " | ".join(c.ljust(w) for c, w in zip(cells, widths)) + " |"

    out = [rule, line(header), rule]
    out.extend(line(r) for r in body)
    out.append(rule)
    out.append(f"{len(body)} row(s)")
    return "\n".join(out) + "\n"


def serialize_results(table: ResultTable, fmt: str = "tsv", prefixes: PrefixTable | None = None) -> str:
    if fmt == "tsv":
        return to_tsv(table, prefixes)
    if fmt == "json":
        return to_json(table)
    if fmt == "pretty":
        return to_pretty(table, prefixes)
    raise ValueError(f"unknown result format {fmt!r}; expected one of {', '.join(FORMATS)}")
