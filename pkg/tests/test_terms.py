from datetime import timezone
from decimal import Decimal

import pytest

from eolcycle.terms import (
    BOOLEAN,
    DECIMAL,
    INTEGER,
    STRING,
    TIMESTAMP,
    PrefixTable,
    TermError,
    iri,
    literal,
    parse_lexical,
    parse_timestamp,
    shorten,
)


def test_literal_infers_datatype():
    assert literal(3).datatype == INTEGER
    assert literal(Decimal("0.5")).datatype == DECIMAL
    assert literal(True).datatype == BOOLEAN
    assert literal("x").datatype == STRING


def test_literals_compare_by_value_not_lexical_form():
    assert parse_lexical("007", INTEGER) == parse_lexical("7", INTEGER)
    assert parse_lexical("1.50", DECIMAL) == parse_lexical("1.5", DECIMAL)
    # same number, different datatype: different terms
    assert literal(1) != literal(Decimal(1))


def test_bad_lexical_forms_raise():
    for text, dt in [("abc", INTEGER), ("1.2.3", DECIMAL), ("yes", BOOLEAN), ("2024-13-01", TIMESTAMP)]:
        with pytest.raises(TermError):
            parse_lexical(text, dt)


def test_timestamps_normalize_to_utc():
    a = parse_timestamp("2024-05-14T09:00:00+02:00")
    b = parse_timestamp("2024-05-14T07:00:00Z")
    assert a == b
    assert a.tzinfo == timezone.utc
    assert parse_timestamp("2024-05-14").hour == 0


def test_iris_sort_before_literals():
    terms = [literal(1), iri("http://x/b"), literal("a"), iri("http://x/a")]
    ordered = sorted(terms, key=lambda t: t.sort_key())
    assert [t.is_iri for t in ordered] == [True, True, False, False]


def test_prefix_table_expand_and_compact():
    table = PrefixTable({"ex": "http://ex.org/", "exs": "http://ex.org/sub/"})
    assert table.expand("ex:a") == "http://ex.org/a"
    # longest matching namespace wins
    assert table.compact("http://ex.org/sub/b") == "exs:b"
    assert table.compact("http://other/x") == "<http://other/x>"
    with pytest.raises(TermError) as err:
        table.expand("nope:a")
    assert err.value.code == "unknown-prefix"


def test_shorten_unbound_is_empty():
    assert shorten(None) == ""
