import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eolcycle.graph import ADDED, BACKWARD, BOTH, DUPLICATE, FORWARD, Fact, Graph, GraphError, entity_closure
from eolcycle.schema import (
    COMPONENT,
    GROUPED_COMPONENT,
    HAS_COMPONENT,
    HAS_HEALTH_STATE,
    HAS_PROPERTY,
    IS_COMPONENT_OF,
    PRODUCT,
    REFERENCE_SERVICE_LIFE,
    GREEN,
    ccpo,
    new_graph,
    prov,
)
from eolcycle.terms import RDF_TYPE, literal, var

from helpers import NODES, P, Q, R, iwp_graph, toy_schema


def test_assert_reports_added_then_duplicate():
    g = new_graph()
    f = Fact(ccpo("x"), RDF_TYPE, PRODUCT)
    assert g.assert_fact(f) == ADDED
    assert g.assert_fact(f) == DUPLICATE
    assert len(g.triples(ccpo("x"), RDF_TYPE, None)) == 1


def test_types_materialize_up_the_subclass_chain():
    g = new_graph()
    g.add(Fact(ccpo("panel"), RDF_TYPE, GROUPED_COMPONENT))
    assert {PRODUCT, GROUPED_COMPONENT} <= g.types(ccpo("panel"))


def test_inverse_and_super_properties_materialize():
    g = new_graph()
    g.add(Fact(ccpo("panel"), HAS_COMPONENT, ccpo("core")))
    assert (ccpo("core"), IS_COMPONENT_OF, ccpo("panel")) in g
    g.add(Fact(ccpo("panel"), HAS_HEALTH_STATE, GREEN))
    assert (ccpo("panel"), HAS_PROPERTY, GREEN) in g


def test_enumerated_values_count_as_instances():
    g = new_graph()
    assert g.is_instance(GREEN, ccpo("HealthRating"))
    assert not g.is_instance(GREEN, COMPONENT)


@pytest.mark.parametrize(
    "fact, code",
    [
        (Fact(ccpo("x"), RDF_TYPE, ccpo("Spaceship")), "unknown-class"),
        (Fact(ccpo("x"), ccpo("flies"), ccpo("y")), "unknown-predicate"),
        (Fact(ccpo("x"), REFERENCE_SERVICE_LIFE, literal("twenty")), "datatype-mismatch"),
        (Fact(ccpo("x"), HAS_COMPONENT, literal(3)), "datatype-mismatch"),
        (Fact(var("x"), RDF_TYPE, PRODUCT), "variable-in-fact"),
    ],
)
def test_rejected_facts(fact, code):
    g = new_graph()
    with pytest.raises(GraphError) as err:
        g.add(fact)
    assert err.value.code == code
    assert len(g) == 0


def test_index_lookups_agree_with_linear_scan_on_fixture():
    g = iwp_graph()
    for f in g.facts()[:60]:
        for s, p, o in [(f.subject, None, None), (None, f.predicate, None), (None, None, f.object),
                        (f.subject, f.predicate, None), (None, f.predicate, f.object)]:
            assert g.triples(s, p, o) == g.scan(s, p, o)


def test_index_coherence_over_many_facts():
    rng = random.Random(7)
    nodes = [ccpo(f"m{i}") for i in range(40)]
    g = Graph(toy_schema())
    while len(g) < 1200:
        g.add(Fact(rng.choice(nodes), rng.choice((P, Q, R)), rng.choice(nodes)))
    for _ in range(300):
        probe = (rng.choice(nodes), rng.choice((P, Q, R)), rng.choice(nodes))
        for mask in range(8):
            s, p, o = (t if mask & (1 << i) else None for i, t in enumerate(probe))
            assert g.triples(s, p, o) == g.scan(s, p, o)


def test_closure_follows_provenance_backward():
    g = iwp_graph()
    rels = [prov("wasGeneratedBy"), prov("used")]
    sub = entity_closure(g, ccpo("iwp1"), rels, BACKWARD)
    for node in ("panelAssembly", "steelFacingA", "steelFacingProduction", "steelCoil", "steelmaking", "ironOre", "basaltRock"):
        assert ccpo(node) in sub.nodes
    # nothing downstream of the panel
    assert ccpo("installation") not in sub.nodes


def test_closure_forward_finds_what_a_material_fed():
    g = iwp_graph()
    rels = [prov("wasGeneratedBy"), prov("used")]
    sub = entity_closure(g, ccpo("ironOre"), rels, FORWARD)
    assert {ccpo("steelmaking"), ccpo("steelCoil"), ccpo("iwp1")} <= sub.nodes
    both = entity_closure(g, ccpo("steelCoil"), rels, BOTH)
    assert sub.nodes & both.nodes


def test_closure_unknown_root():
    with pytest.raises(GraphError) as err:
        entity_closure(iwp_graph(), ccpo("ghost"), [prov("used")])
    assert err.value.code == "unknown-entity"


def test_closure_terminates_on_cycles():
    g = Graph(toy_schema())
    a, b, c = NODES[:3]
    for s, o in [(a, b), (b, c), (c, a)]:
        g.add(Fact(s, P, o))
    assert entity_closure(g, a, [P]).nodes == {a, b, c}


triples = st.lists(
    st.tuples(st.sampled_from(NODES), st.sampled_from([P, Q, R]), st.sampled_from(NODES)),
    min_size=1,
    max_size=40,
)


@settings(max_examples=80, deadline=None)
@given(base=triples, extra=triples, root=st.sampled_from(NODES))
def test_closure_is_monotone(base, extra, root):
    g = Graph(toy_schema())
    g.add(Fact(root, P, root))
    for s, p, o in base:
        g.add(Fact(s, p, o))
    small = entity_closure(g, root, [P, Q]).nodes
    for s, p, o in extra:
        g.add(Fact(s, p, o))
    assert small <= entity_closure(g, root, [P, Q]).nodes


@settings(max_examples=60, deadline=None)
@given(facts=triples)
def test_copy_is_independent(facts):
    g = Graph(toy_schema())
    for s, p, o in facts:
        g.add(Fact(s, p, o))
    h = g.copy()
    h.add(Fact(NODES[0], R, NODES[7]))
    h.add(Fact(NODES[7], R, NODES[0]))
    assert len(h) >= len(g)
    assert all(f.triple in h for f in g.facts())
