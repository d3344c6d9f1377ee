from __future__ import annotations

import json
import random

import numpy as np
import pytest

from litsearch.entities import Entity, Origin
from litsearch.errors import EmptyExpansion, ParseError
from litsearch.expansion import ExpansionEntry, ExpansionSet
from litsearch.kg import FieldTag
from litsearch.query import (
    BooleanQuery,
    TaggedTerm,
    build_specific_query,
    parse_query,
    render,
    term_variants,
)
from litsearch.stemming import STEM_TABLE_VERSION, stem

from .conftest import GOLDEN, TEST_DATA
from .generators import random_query


def golden_expansion() -> ExpansionSet:
    mask = json.loads((GOLDEN / "mask_terms.json").read_text())
    entries = [
        ExpansionEntry(Entity("Gender", None, Origin.QUERY)),
        ExpansionEntry(Entity("surgeries", None, Origin.QUERY)),
        ExpansionEntry(
            Entity("female-to-male transgender", "FTM", Origin.QUERY),
            mask_terms=mask["female-to-male transgender"],
        ),
        ExpansionEntry(Entity("individuals", None, Origin.QUERY)),
    ]
    return ExpansionSet(entries, np.zeros(256))


def golden_key() -> str:
    return (GOLDEN / "search_key.txt").read_text().rstrip("\n")


def test_stem_golden_pairs():
    golden = json.loads((TEST_DATA / "stem_golden.json").read_text())
    assert STEM_TABLE_VERSION == golden["table_version"], (
        "stem table changed: regenerate the golden pairs deliberately")
    for word, expected in golden["pairs"].items():
        assert stem(word) == expected, word


def test_term_variants_single_token():
    variants = term_variants("Gender")
    assert [v.render() for v in variants] == ['"Gender"[tiab]', "Gender[tiab]", "gender*[tiab]"]


def test_term_variants_wildcard_uses_stem_table():
    assert "surgeri*[tiab]" in [v.render() for v in term_variants("surgeries")]


def test_term_variants_short_token_has_no_wildcard():
    variants = term_variants("cat")
    assert [v.render() for v in variants] == ['"cat"[tiab]', "cat[tiab]"]


def test_term_variants_multiword_is_quoted_only():
    variants = term_variants("female-to-male transgender")
    assert [v.render() for v in variants] == ['"female-to-male transgender"[tiab]']


def test_golden_query_renders_byte_exact():
    rendered = render(build_specific_query(golden_expansion()))
    assert rendered == golden_key()


def test_single_entity_no_expansions():
    exp = ExpansionSet([ExpansionEntry(Entity("catgut", None, Origin.QUERY))], np.zeros(4))
    query = build_specific_query(exp)
    assert len(query.groups) == 1
    assert render(query) == '("catgut"[tiab] OR catgut[tiab])'


def test_group_order_preserved():
    entries = [ExpansionEntry(Entity(w, None, Origin.QUERY))
               for w in ("alpha", "beta", "gamma")]
    query = build_specific_query(ExpansionSet(entries, np.zeros(4)))
    assert len(query.groups) == 3
    assert [g[0].text for g in query.groups] == ["alpha", "beta", "gamma"]


def test_expansion_terms_carry_tags_and_quoting():
    entry = ExpansionEntry(
        Entity("sutures", "D013537", Origin.QUERY),
        kg_terms=[("Surgical Equipment", FieldTag.MESH), ("catgut", FieldTag.TIAB)],
        mask_terms=["wound closure"],
    )
    rendered = render(build_specific_query(ExpansionSet([entry], np.zeros(4))))
    assert '"Surgical Equipment"[Mesh]' in rendered
    assert "catgut[tiab]" in rendered
    assert '"wound closure"[tiab]' in rendered


def test_empty_expansion_rejected():
    with pytest.raises(EmptyExpansion):
        build_specific_query(ExpansionSet([], np.zeros(4)))


def test_render_minimal_quoted_group():
    query = BooleanQuery(((TaggedTerm("wound infections", quoted=True),),))
    assert render(query) == '("wound infections"[tiab])'


def test_parse_golden_key_group_shape():
    query = parse_query(golden_key())
    assert [len(g) for g in query.groups] == [3, 3, 7, 3]
    assert query.groups[0][0] == TaggedTerm("Gender", quoted=True)
    assert query.groups[2][2] == TaggedTerm("femal", wildcard=True)


def test_parse_unbalanced_raises():
    with pytest.raises(ParseError):
        parse_query("(foo[tiab] AND")


@pytest.mark.parametrize("bad", [
    "",
    "()",
    "(foo[tiab]",
    "(foo[bad])",
    "(foo)",
    '("unclosed[tiab])',
    "(foo[tiab]) OR (bar[tiab])",
    "(foo*bar[tiab])",
])
def test_parse_rejects_malformed(bad):
    with pytest.raises(ParseError):
        parse_query(bad)


def test_round_trip_on_random_asts():
    rng = random.Random(21)
    for _ in range(200):
        query = random_query(rng, max_groups=4, max_terms=5)
        rendered = render(query)
        assert parse_query(rendered) == query
        assert render(parse_query(rendered)) == rendered


def test_round_trip_golden_fixed_point():
    rendered = golden_key()
    assert render(parse_query(rendered)) == rendered


def test_tagged_term_invariants():
    with pytest.raises(ValueError):
        TaggedTerm("")
    with pytest.raises(ValueError):
        TaggedTerm("multi word")  # unquoted multiword
    with pytest.raises(ValueError):
        TaggedTerm("stem", quoted=True, wildcard=True)
    with pytest.raises(ValueError):
        TaggedTerm("bad*char")


def test_parse_reserved_characters_raise_parse_error_not_value_error():
    with pytest.raises(ParseError):
        parse_query('("foo[x]"[tiab])')
    with pytest.raises(ParseError):
        parse_query('("a*b"[tiab])')
