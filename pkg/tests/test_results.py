import json

import pytest

from eolcycle.query import execute, parse_query, serialize_results

from helpers import iwp_graph

QUERY = (
    "PREFIX ccpo: <http://example.org/ccpo#>\n"
    "SELECT ?c ?n ?a WHERE { ccpo:iwp1 ccpo:hasComponent ?c "
    "OPTIONAL { ?c ccpo:hasNonVirginMaterial ?n } OPTIONAL { ?c ccpo:actualServiceLife ?a } } ORDER BY ?c"
)


@pytest.fixture
def table_and_prefixes():
    g = iwp_graph()
    return execute(parse_query(QUERY), g), g.prefixes


def test_tsv_header_and_empty_cells(table_and_prefixes):
    table, prefixes = table_and_prefixes
    lines = serialize_results(table, "tsv", prefixes).splitlines()
    assert lines[0] == "?c\t?n\t?a"
    assert lines[1] == "ccpo:mineralWoolCore\t\t"


def test_json_omits_unbound_and_is_stable(table_and_prefixes):
    table, prefixes = table_and_prefixes
    text = serialize_results(table, "json", prefixes)
    doc = json.loads(text)
    assert doc["version"] == 1
    assert doc["head"]["vars"] == ["c", "n", "a"]
    first = doc["results"]["bindings"][0]
    assert set(first) == {"c"}
    assert first["c"] == {"type": "uri", "value": "http://example.org/ccpo#mineralWoolCore"}
    assert text == serialize_results(table, "json", prefixes)


def test_json_literals_carry_datatype():
    g = iwp_graph()
    t = execute(parse_query("PREFIX ccpo: <http://example.org/ccpo#> SELECT ?a WHERE { ccpo:iwp1 ccpo:actualServiceLife ?a }"), g)
    cell = json.loads(serialize_results(t, "json"))["results"]["bindings"][0]["a"]
    assert cell == {"type": "literal", "value": "24", "datatype": "http://www.w3.org/2001/XMLSchema#integer"}


def test_pretty_table(table_and_prefixes):
    table, prefixes = table_and_prefixes
    text = serialize_results(table, "pretty", prefixes)
    lines = text.splitlines()
    assert lines[-1] == "3 row(s)"
    assert len({len(line) for line in lines[:-1]}) == 1


def test_unknown_format(table_and_prefixes):
    with pytest.raises(ValueError):
        serialize_results(table_and_prefixes[0], "xml")
