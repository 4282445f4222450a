"""In-memory fact store with SPO / POS / OSP indexes and a class/property schema."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .terms import (
    DECIMAL,
    INTEGER,
    IRI,
    LITERAL,
    RDF_TYPE,
    PrefixTable,
    Term,
)

ASSERTED = "asserted"
OBJECT_PROPERTY = "object"
DATA_PROPERTY = "data"

ADDED = "added"
DUPLICATE = "duplicate"


class GraphError(ValueError):
    def __init__(self, code: str, message: str, entity: Term | None = None):
        super().__init__(message)
        self.code = code
        self.entity = entity


@dataclass(frozen=True)
class SchemaClass:
    name: Term
    parents: tuple[Term, ...] = ()
    disjoint_with: frozenset[Term] = frozenset()
    # enumerated members accepted as instances without an rdf:type fact
    one_of: frozenset[Term] = frozenset()


@dataclass(frozen=True)
class PropertyDef:
    name: Term
    kind: str
    # unions of classes; empty means unconstrained
    domain: tuple[Term, ...] = ()
    range: tuple[Term, ...] | str = ()
    inverse_of: Term | None = None
    parents: tuple[Term, ...] = ()


@dataclass(frozen=True)
class Fact:
    subject: Term
    predicate: Term
    object: Term
    origin: str = field(default=ASSERTED, compare=False, hash=False)

    @property
    def triple(self) -> tuple[Term, Term, Term]:
        return (self.subject, self.predicate, self.object)

    @property
    def inferred(self) -> bool:
        return self.origin != ASSERTED

    def sort_key(self) -> tuple:
        return (self.subject.sort_key(), self.predicate.sort_key(), self.object.sort_key())


def inferred_by(rule: str) -> str:
    return f"inferred({rule})"


class Schema:
    """Classes and properties. Subclass links must stay acyclic."""

    def __init__(self) -> None:
        self.classes: dict[Term, SchemaClass] = {}
        self.properties: dict[Term, PropertyDef] = {}

    def add_class(self, cls: SchemaClass) -> None:
        for parent in cls.parents:
            if parent not in self.classes:
                raise GraphError("unknown-class", f"parent class {parent!r} not declared", cls.name)
            if cls.name == parent or cls.name in self.superclasses(parent):
                raise GraphError("cyclic-subclass", f"subclass cycle through {cls.name!r}", cls.name)
        self.classes[cls.name] = cls

    def declare_disjoint(self, *names: Term) -> None:
        for a in names:
            others = frozenset(n for n in names if n != a)
            cls = self.classes[a]
            self.classes[a] = SchemaClass(cls.name, cls.parents, cls.disjoint_with | others, cls.one_of)

    def add_property(self, prop: PropertyDef) -> None:
        if prop.kind == OBJECT_PROPERTY:
            if isinstance(prop.range, str):
                raise GraphError("bad-range", f"object property {prop.name!r} needs class range")
            for c in (*prop.domain, *prop.range):
                if c not in self.classes:
                    raise GraphError("unknown-class", f"{c!r} not declared", prop.name)
        elif not isinstance(prop.range, str):
            raise GraphError("bad-range", f"data property {prop.name!r} needs datatype range")
        self.properties[prop.name] = prop
        if prop.inverse_of is not None:
            other = self.properties.get(prop.inverse_of)
            if other is not None and other.inverse_of != prop.name:
                self.properties[other.name] = PropertyDef(
                    other.name, other.kind, other.domain, other.range, prop.name, other.parents
                )

    def superclasses(self, name: Term) -> set[Term]:
        """Strict ancestors of a class."""
        seen: set[Term] = set()
        stack = list(self.classes[name].parents) if name in self.classes else []
        while stack:
            c = stack.pop()
            if c not in seen:
                seen.add(c)
                stack.extend(self.classes[c].parents)
        return seen

    def subclasses(self, name: Term) -> set[Term]:
        """The class itself and every descendant."""
        return {c for c in self.classes if c == name or name in self.superclasses(c)}

    def superproperties(self, name: Term) -> set[Term]:
        seen: set[Term] = set()
        stack = list(self.properties[name].parents)
        while stack:
            p = stack.pop()
            if p not in seen:
                seen.add(p)
                stack.extend(self.properties[p].parents)
        return seen

    def copy(self) -> Schema:
        other = Schema()
        other.classes = dict(self.classes)
        other.properties = dict(self.properties)
        return other


def _datatype_ok(expected: str, term: Term) -> bool:
    if term.kind != LITERAL:
        return False
    if expected == DECIMAL:
        return term.datatype in (DECIMAL, INTEGER)
    return term.datatype == expected


class Graph:
    """Facts plus schema plus prefixes.

    Asserting ``x rdf:type C`` also asserts every superclass of ``C``; asserting
    a property fact also asserts its super-properties and its inverse.
    """

    def __init__(self, schema: Schema | None = None, prefixes: PrefixTable | None = None):
        self.schema = schema if schema is not None else Schema()
        self.prefixes = prefixes if prefixes is not None else PrefixTable()
        self._facts: dict[tuple[Term, Term, Term], Fact] = {}
        self._spo: dict[Term, dict[Term, set[Term]]] = defaultdict(lambda: defaultdict(set))
        self._pos: dict[Term, dict[Term, set[Term]]] = defaultdict(lambda: defaultdict(set))
        self._osp: dict[Term, dict[Term, set[Term]]] = defaultdict(lambda: defaultdict(set))

    def __len__(self) -> int:
        return len(self._facts)

    def __contains__(self, triple) -> bool:
        if isinstance(triple, Fact):
            triple = triple.triple
        return triple in self._facts

    def __iter__(self) -> Iterator[Fact]:
        return iter(sorted(self._facts.values(), key=Fact.sort_key))

    def facts(self) -> list[Fact]:
        return list(self)

    def get(self, triple: tuple[Term, Term, Term]) -> Fact | None:
        return self._facts.get(triple)

    def copy(self) -> Graph:
        other = Graph(self.schema, self.prefixes.copy())
        for f in self._facts.values():
            other._insert(f)
        return other

    # -- mutation -------------------------------------------------------

    def check(self, fact: Fact) -> None:
        """Raise GraphError if the fact may not be stored."""
        s, p, o = fact.triple
        for t in (s, p, o):
            if t.is_variable:
                raise GraphError("variable-in-fact", "facts must be ground", t)
        if s.kind != IRI or p.kind != IRI:
            raise GraphError("datatype-mismatch", "subject and predicate must be IRIs", s)
        if p == RDF_TYPE:
            if o not in self.schema.classes:
                raise GraphError("unknown-class", f"{self.prefixes.compact(o.value) if o.is_iri else o!r} is not a schema class", o)
            return
        prop = self.schema.properties.get(p)
        if prop is None:
            raise GraphError("unknown-predicate", f"{self.prefixes.compact(p.value)} is not a registered property", p)
        if prop.kind == OBJECT_PROPERTY and o.kind != IRI:
            raise GraphError(
                "datatype-mismatch",
                f"{self.prefixes.compact(p.value)} is an object property but got literal {o.lexical_form()!r}",
                s,
            )
        if prop.kind == DATA_PROPERTY and not _datatype_ok(prop.range, o):
            raise GraphError(
                "datatype-mismatch",
                f"{self.prefixes.compact(p.value)} expects {prop.range}, got {o!r}",
                s,
            )

    def entailed(self, fact: Fact) -> list[Fact]:
        """The fact followed by the facts it materializes (supertypes, super/inverse properties)."""
        out = [fact]
        s, p, o = fact.triple
        if p == RDF_TYPE:
            for c in sorted(self.schema.superclasses(o), key=Term.sort_key):
                out.append(Fact(s, p, c, fact.origin))
            return out
        preds = [p, *sorted(self.schema.superproperties(p), key=Term.sort_key)]
        for q in preds[1:]:
            out.append(Fact(s, q, o, fact.origin))
        for q in preds:
            inv = self.schema.properties[q].inverse_of
            if inv is not None and o.kind == IRI:
                out.append(Fact(o, inv, s, fact.origin))
        return out

    def assert_fact(self, fact: Fact) -> str:
        """Insert a fact and its materialized consequences; returns ``added`` or ``duplicate``."""
        existed = fact.triple in self._facts
        self.add(fact)
        return DUPLICATE if existed else ADDED

    def add(self, fact: Fact) -> list[Fact]:
        """Insert a fact; return the facts that were actually new (possibly empty)."""
        self.check(fact)
        new: list[Fact] = []
        for f in self.entailed(fact):
            if f.triple not in self._facts:
                self._insert(f)
                new.append(f)
        return new

    def _insert(self, fact: Fact) -> None:
        s, p, o = fact.triple
        self._facts[fact.triple] = fact
        self._spo[s][p].add(o)
        self._pos[p][o].add(s)
        self._osp[o][s].add(p)

    def _remove(self, triple: tuple[Term, Term, Term]) -> None:
        # rollback support for aborted inference only
        s, p, o = triple
        del self._facts[triple]
        self._spo[s][p].discard(o)
        self._pos[p][o].discard(s)
        self._osp[o][s].discard(p)

    # -- lookup ---------------------------------------------------------

    def _candidates(self, s: Term | None, p: Term | None, o: Term | None) -> Iterable[tuple[Term, Term, Term]]:
        if s is not None:
            by_p = self._spo.get(s, {})
            if p is not None:
                objs = by_p.get(p, ())
                if o is not None:
                    return [(s, p, o)] if o in objs else []
                return [(s, p, x) for x in objs]
            if o is not None:
                return [(s, q, o) for q in self._osp.get(o, {}).get(s, ())]
            return [(s, q, x) for q, xs in by_p.items() for x in xs]
        if p is not None:
            by_o = self._pos.get(p, {})
            if o is not None:
                return [(x, p, o) for x in by_o.get(o, ())]
            return [(x, p, y) for y, xs in by_o.items() for x in xs]
        if o is not None:
            return [(x, q, o) for x, qs in self._osp.get(o, {}).items() for q in qs]
        return list(self._facts)

    def triples(self, s: Term | None = None, p: Term | None = None, o: Term | None = None) -> list[Fact]:
        """Facts matching the constant positions (None = wildcard), canonical order."""
        found = [self._facts[t] for t in self._candidates(s, p, o)]
        found.sort(key=Fact.sort_key)
        return found

    def scan(self, s: Term | None = None, p: Term | None = None, o: Term | None = None) -> list[Fact]:
        """Linear-scan twin of ``triples``; used to check index coherence."""
        found = [
            f for f in self._facts.values()
            if (s is None or f.subject == s) and (p is None or f.predicate == p) and (o is None or f.object == o)
        ]
        found.sort(key=Fact.sort_key)
        return found

    def objects(self, s: Term, p: Term) -> list[Term]:
        return sorted(self._spo.get(s, {}).get(p, ()), key=Term.sort_key)

    def value(self, s: Term, p: Term) -> Term | None:
        objs = self.objects(s, p)
        return objs[0] if objs else None

    def types(self, s: Term) -> set[Term]:
        return set(self._spo.get(s, {}).get(RDF_TYPE, ()))

    def is_instance(self, s: Term, cls: Term) -> bool:
        if cls in self.types(s):
            return True
        return any(s in self.schema.classes[c].one_of for c in self.schema.subclasses(cls))

    def mentions(self, entity: Term) -> bool:
        as_subject = any(self._spo.get(entity, {}).values())
        return as_subject or any(self._osp.get(entity, {}).values())

    def subjects(self) -> list[Term]:
        return sorted({f[0] for f in self._facts}, key=Term.sort_key)


def match_pattern(graph: Graph, pattern: tuple[Term, Term, Term]) -> Iterator[dict[str, Term]]:
    """Yield one binding per fact unifying with an (s, p, o) pattern."""
    consts = [None if t.is_variable else t for t in pattern]
    for fact in graph.triples(*consts):
        binding: dict[str, Term] = {}
        ok = True
        for t, value in zip(pattern, fact.triple):
            if t.is_variable:
                seen = binding.get(t.value)
                if seen is not None and seen != value:
                    ok = False
                    break
                binding[t.value] = value
        if ok:
            yield binding


class Subgraph(Graph):
    """A closure result: the reached nodes and the edges traversed."""

    nodes: frozenset[Term] = frozenset()


FORWARD = "forward"
BACKWARD = "backward"
BOTH = "both"


def entity_closure(graph: Graph, root: Term, relations: Iterable[Term], direction: str = BACKWARD) -> Subgraph:
    """Subgraph reachable from ``root`` over ``relations``.

    Directions are in provenance time. PROV edges (``wasGeneratedBy``,
    ``used``) point from an entity to its past, so ``backward`` follows edges
    subject to object (toward origins) and ``forward`` follows them object to
    subject (toward descendants).
    """
    if direction not in (FORWARD, BACKWARD, BOTH):
        raise ValueError(f"bad direction {direction!r}")
    if not graph.mentions(root):
        raise GraphError("unknown-entity", f"{graph.prefixes.compact(root.value)} is not in the graph", root)
    relations = list(relations)
    sub = Subgraph(graph.schema, graph.prefixes.copy())
    seen = {root}
    queue = [root]
    while queue:
        node = queue.pop(0)
        for rel in relations:
            edges: list[Fact] = []
            if direction in (BACKWARD, BOTH):
                edges += graph.triples(node, rel, None)
            if direction in (FORWARD, BOTH):
                edges += graph.triples(None, rel, node)
            for f in edges:
                sub._insert(f)
                nxt = f.object if f.subject == node else f.subject
                if nxt.is_iri and nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
    sub.nodes = frozenset(seen)
    return sub
