"""Shared test helpers: a toy schema for random graphs and naive reference evaluators."""

from __future__ import annotations

import itertools
import random

from eolcycle.graph import DATA_PROPERTY, OBJECT_PROPERTY, Fact, Graph, PropertyDef, Schema, SchemaClass
from eolcycle.terms import CCPO, INTEGER, RDF_TYPE, iri, literal
from eolcycle.validate import load_files
from eolcycle.eol import bundled_path

P, Q, R = (iri(CCPO + n) for n in ("p", "q", "r"))
V = iri(CCPO + "v")
A, B = iri(CCPO + "A"), iri(CCPO + "B")
NODES = [iri(f"{CCPO}n{i}") for i in range(8)]
VALUES = [literal(i) for i in range(4)]


def toy_schema() -> Schema:
    """Unconstrained classes and properties, so any combination of facts is storable."""
    schema = Schema()
    schema.add_class(SchemaClass(A))
    schema.add_class(SchemaClass(B))
    for p in (P, Q, R):
        schema.add_property(PropertyDef(p, OBJECT_PROPERTY))
    schema.add_property(PropertyDef(V, DATA_PROPERTY, range=INTEGER))
    return schema


def random_fact(rng: random.Random) -> Fact:
    roll = rng.random()
    s = rng.choice(NODES)
    if roll < 0.15:
        return Fact(s, RDF_TYPE, rng.choice((A, B)))
    if roll < 0.3:
        return Fact(s, V, rng.choice(VALUES))
    return Fact(s, rng.choice((P, Q, R)), rng.choice(NODES))


def random_graph(rng: random.Random, n: int) -> Graph:
    g = Graph(toy_schema())
    for _ in range(n):
        g.add(random_fact(rng))
    return g


def fact_set(graph: Graph) -> set:
    return {f.triple for f in graph.facts()}


# Recursive rules over the toy schema; none compute values, so all terminate.
RULE_POOL = [
    "T1: p(?x, ?y) -> q(?x, ?y)",
    "T2: q(?x, ?y) ^ q(?y, ?z) -> q(?x, ?z)",
    "T3: p(?x, ?y) -> r(?y, ?x)",
    "T4: r(?x, ?y) ^ p(?y, ?z) -> q(?x, ?z)",
    "T5: A(?x) ^ p(?x, ?y) -> B(?y)",
    "T6: B(?x) ^ q(?x, ?y) -> A(?y)",
    "T7: r(?x, ?y) ^ v(?x, ?n) ^ swrlb:greaterThan(?n, 1) -> A(?y)",
    "T8: q(?x, ?x) -> B(?x)",
]


def naive_closure(graph: Graph, rules) -> set:
    """Reference fixpoint: re-run every rule against everything until nothing changes."""
    from eolcycle.rules.builtins import evaluate_builtin
    from eolcycle.rules.syntax import BUILTIN_ATOM

    facts = fact_set(graph)
    while True:
        new = set()
        for rule in rules:
            for b in _naive_body(rule.body, facts, {}, evaluate_builtin, BUILTIN_ATOM):
                h = tuple(b[t.value] if t.is_variable else t for t in rule.head.as_triple())
                if h not in facts:
                    new.add(h)
        if not new:
            return facts
        facts |= new


def _naive_body(atoms, facts, b, evaluate_builtin, builtin_kind):
    if not atoms:
        yield b
        return
    atom, rest = atoms[0], atoms[1:]
    if atom.kind == builtin_kind:
        args = [b.get(t.value) if t.is_variable else t for t in atom.args]
        if evaluate_builtin(atom.builtin, args) is True:
            yield from _naive_body(rest, facts, b, evaluate_builtin, builtin_kind)
        return
    pattern = atom.as_triple()
    for triple in facts:
        nb = dict(b)
        if all(_unify(t, v, nb) for t, v in zip(pattern, triple)):
            yield from _naive_body(rest, facts, nb, evaluate_builtin, builtin_kind)


def _unify(t, value, b) -> bool:
    if not t.is_variable:
        return t == value
    seen = b.setdefault(t.value, value)
    return seen == value


def naive_bgp(patterns, facts) -> list[dict]:
    """All solutions of a conjunctive pattern list by plain nested loops in written order."""
    out = []
    for combo in itertools.product(facts, repeat=len(patterns)):
        b: dict = {}
        if all(_unify(t, v, b) for pat, f in zip(patterns, combo) for t, v in zip(pat, f)):
            out.append(b)
    return out


def iwp_graph() -> Graph:
    return load_files([bundled_path("fixtures", "iwp.ttl")]).graph
