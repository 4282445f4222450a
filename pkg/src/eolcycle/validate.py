"""Closed-world consistency checks over a loaded graph."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .graph import OBJECT_PROPERTY, Fact, Graph, GraphError
from .schema import (
    ACTIVITY,
    COMPONENT,
    ENDED_AT,
    GROUPED_COMPONENT,
    HAS_COMPONENT,
    HAS_INFORMATION_ARTIFACT,
    MATERIAL,
    OWNERSHIP_RECORD,
    PRODUCT,
    STARTED_AT,
    WAS_GENERATED_BY,
    new_graph,
)
from .terms import RDF_TYPE, Term, shorten
from .turtle import ParseError, parse_data

STRICT = "strict"
ADVISORY = "advisory"

MIN_COMPONENTS = 2


@dataclass(frozen=True)
class Issue:
    code: str
    entity: str
    message: str

    def as_dict(self) -> dict:
        return {"code": self.code, "entity": self.entity, "message": self.message}


@dataclass
class ValidationReport:
    errors: list[Issue] = field(default_factory=list)
    warnings: list[Issue] = field(default_factory=list)
    checked: int = 0

    @property
    def consistent(self) -> bool:
        return not self.errors

    def as_dict(self) -> dict:
        return {
            "errors": [i.as_dict() for i in self.errors],
            "warnings": [i.as_dict() for i in self.warnings],
            "checked": self.checked,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)

    def codes(self) -> set[str]:
        return {i.code for i in self.errors} | {i.code for i in self.warnings}


def _ordered(terms: Iterable[Term]) -> list[Term]:
    return sorted(terms, key=Term.sort_key)


def validate(graph: Graph, mode: str = ADVISORY) -> ValidationReport:
    """Run every closed-world check; problems become report entries, never exceptions."""
    if mode not in (STRICT, ADVISORY):
        raise ValueError(f"unknown validation mode {mode!r}")
    report = ValidationReport()
    name = lambda t: shorten(t, graph.prefixes)  # noqa: E731

    def emit(code: str, entity: Term, message: str, severity: str = "error") -> None:
        target = report.errors if severity == "error" else report.warnings
        target.append(Issue(code, name(entity), message))

    schema = graph.schema
    subjects = graph.subjects()

    # disjoint classes
    for s in subjects:
        types = graph.types(s)
        flagged: set[frozenset[Term]] = set()
        for t in _ordered(types):
            for other in _ordered(schema.classes[t].disjoint_with):
                report.checked += 1
                pair = frozenset((t, other))
                if other in types and pair not in flagged:
                    flagged.add(pair)
                    a, b = sorted((name(t), name(other)))
                    emit("disjointness", s, f"{name(s)} is typed both {a} and {b}, which are disjoint")

    # grouped components need >= 2 distinct Component parts
    for s in _ordered(f.subject for f in graph.triples(None, RDF_TYPE, GROUPED_COMPONENT)):
        report.checked += 1
        parts = {o for o in graph.objects(s, HAS_COMPONENT) if graph.is_instance(o, COMPONENT)}
        if len(parts) < MIN_COMPONENTS:
            emit(
                "cardinality",
                s,
                f"{name(s)} is a GroupedComponent with {len(parts)} component(s); at least {MIN_COMPONENTS} required",
            )

    # domain / range conformance
    for fact in graph.facts():
        s, p, o = fact.triple
        if p == RDF_TYPE:
            continue
        prop = schema.properties.get(p)
        report.checked += 1
        if prop is None:
            emit("unknown-predicate", s, f"{name(p)} is not a registered property")
            continue
        if prop.domain and not any(graph.is_instance(s, c) for c in prop.domain):
            allowed = " or ".join(name(c) for c in prop.domain)
            emit("domain", s, f"{name(s)} uses {name(p)} but is not a {allowed}")
        if prop.kind == OBJECT_PROPERTY:
            if prop.range and not any(graph.is_instance(o, c) for c in prop.range):
                allowed = " or ".join(name(c) for c in prop.range)
                emit("range", s, f"object {name(o)} of {name(p)} is not a {allowed}")
        else:
            try:
                graph.check(fact)
            except GraphError as exc:
                emit("range", s, str(exc))

    # finite-time processes: end must not precede start
    for cls in (ACTIVITY, OWNERSHIP_RECORD):
        for s in _ordered(f.subject for f in graph.triples(None, RDF_TYPE, cls)):
            report.checked += 1
            start, end = graph.value(s, STARTED_AT), graph.value(s, ENDED_AT)
            if start is not None and end is not None and end.value < start.value:
                emit(
                    "temporal",
                    s,
                    f"{name(s)} ends ({end.lexical_form()}) before it starts ({start.lexical_form()})",
                )

    # existential axioms: unfalsifiable under open world, so warnings unless strict
    severity = "error" if mode == STRICT else "warning"
    for s in _ordered(f.subject for f in graph.triples(None, RDF_TYPE, PRODUCT)):
        report.checked += 1
        if not graph.objects(s, WAS_GENERATED_BY):
            emit("missing-generation", s, f"{name(s)} has no prov:wasGeneratedBy activity", severity)
    for cls in (PRODUCT, MATERIAL):
        for s in _ordered(f.subject for f in graph.triples(None, RDF_TYPE, cls)):
            report.checked += 1
            if not graph.objects(s, HAS_INFORMATION_ARTIFACT):
                emit("missing-information-artifact", s, f"{name(s)} has no information-bearing artifact", severity)

    return report


@dataclass
class Loaded:
    graph: Graph
    rejected: list[tuple[Fact, GraphError]]


def load_text(text: str, graph: Graph | None = None) -> Loaded:
    """Parse and assert text into a graph, collecting facts the schema refuses."""
    graph = graph if graph is not None else new_graph()
    facts, prefixes = parse_data(text, graph.prefixes)
    for prefix, ns in prefixes:
        graph.prefixes.bind(prefix, ns)
    rejected = []
    for fact in facts:
        try:
            graph.add(fact)
        except GraphError as exc:
            rejected.append((fact, exc))
    return Loaded(graph, rejected)


def load_files(paths: Iterable[str | Path], graph: Graph | None = None) -> Loaded:
    """Load several data files into one graph. Raises OSError / ParseError on bad input."""
    graph = graph if graph is not None else new_graph()
    rejected = []
    for path in paths:
        text = Path(path).read_text(encoding="utf-8")
        try:
            loaded = load_text(text, graph)
        except ParseError as exc:
            wrapped = ParseError(exc.code, f"{path}: {exc}")
            wrapped.line, wrapped.column = exc.line, exc.column
            raise wrapped from None
        rejected.extend(loaded.rejected)
    return Loaded(graph, rejected)


def rejection_issues(loaded: Loaded) -> list[Issue]:
    out = []
    for fact, exc in loaded.rejected:
        out.append(Issue(exc.code, shorten(fact.subject, loaded.graph.prefixes), str(exc)))
    return out
