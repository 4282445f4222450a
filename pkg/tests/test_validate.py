import json
from pathlib import Path

import pytest

from eolcycle.eol import bundled_path
from eolcycle.schema import PRODUCT, ccpo
from eolcycle.validate import ADVISORY, STRICT, load_files, load_text, rejection_issues, validate

DATA = Path(__file__).parent / "data"
IWP = bundled_path("fixtures", "iwp.ttl")


def seeded(name):
    return load_files([IWP, DATA / f"seed_{name}.ttl"]).graph


def test_clean_fixture_is_silent():
    report = validate(load_files([IWP]).graph, STRICT)
    assert report.errors == [] and report.warnings == []
    assert report.checked > 300


@pytest.mark.parametrize(
    "seed, code, entity",
    [
        ("disjointness", "disjointness", "ccpo:iwp1"),
        ("cardinality", "cardinality", "ccpo:panel9"),
        ("domain", "domain", "ccpo:installation"),
        ("range", "range", "ccpo:mineralWoolCore"),
        ("temporal", "temporal", "ccpo:refurbishment"),
    ],
)
def test_seeded_errors(seed, code, entity):
    report = validate(seeded(seed))
    assert [(i.code, i.entity) for i in report.errors] == [(code, entity)]
    assert not report.consistent


@pytest.mark.parametrize(
    "seed, code, entity",
    [("missing_generation", "missing-generation", "ccpo:sparePanel"), ("missing_artifact", "missing-information-artifact", "ccpo:sealant")],
)
def test_existential_checks_warn_unless_strict(seed, code, entity):
    graph = seeded(seed)
    advisory = validate(graph, ADVISORY)
    assert advisory.errors == []
    assert [(i.code, i.entity) for i in advisory.warnings] == [(code, entity)]
    strict = validate(graph, STRICT)
    assert [(i.code, i.entity) for i in strict.errors] == [(code, entity)]


def test_bundled_cardinality_fixture():
    report = validate(load_files([bundled_path("fixtures", "bad_cardinality.ttl")]).graph)
    assert report.codes() == {"cardinality"}


def test_report_json_shape():
    doc = json.loads(validate(seeded("temporal")).to_json())
    assert set(doc) == {"errors", "warnings", "checked"}
    assert set(doc["errors"][0]) == {"code", "entity", "message"}


def test_rejected_facts_are_collected_not_raised():
    loaded = load_text(
        "@prefix ccpo: <http://example.org/ccpo#> .\n"
        "ccpo:a a ccpo:Product ; ccpo:referenceServiceLife \"soon\" ; ccpo:flies ccpo:b ."
    )
    codes = [i.code for i in rejection_issues(loaded)]
    assert codes == ["datatype-mismatch", "unknown-predicate"]
    # the valid part of the statement is kept
    assert loaded.graph.types(ccpo("a")) == {PRODUCT}


def test_validation_is_deterministic():
    a = validate(seeded("disjointness")).to_json()
    b = validate(seeded("disjointness")).to_json()
    assert a == b


def test_unknown_mode():
    with pytest.raises(ValueError):
        validate(load_files([IWP]).graph, "lenient")
