from __future__ import annotations

import random

import pytest

from litsearch.corpus import Article, Corpus, evaluate, load_corpus, local_search
from litsearch.errors import MalformedLine
from litsearch.kg import FieldTag
from litsearch.query import BooleanQuery, TaggedTerm, parse_query

from .generators import naive_scan, random_corpus, random_query


def single(term: TaggedTerm) -> BooleanQuery:
    return BooleanQuery(((term,),))


GENDER_DOC = Article("1", "Gender-affirming surgeries in focus",
                     "A practical review for clinicians.")


def test_wildcard_prefix_matches_title_token():
    assert evaluate(single(TaggedTerm("gender", wildcard=True)), GENDER_DOC)


def test_phrase_requires_contiguity():
    doc = Article("2", "Wound management", "The wound healed; infections were absent.")
    assert not evaluate(single(TaggedTerm("wound infections", quoted=True)), doc)
    contiguous = Article("3", "Wound infections in surgery", "")
    assert evaluate(single(TaggedTerm("wound infections", quoted=True)), contiguous)


def test_tiab_covers_title_even_with_empty_abstract():
    doc = Article("4", "Catgut sutures compared", "")
    assert evaluate(single(TaggedTerm("catgut")), doc)


def test_hyphens_split_tokens():
    doc = Article("5", "Female-to-male transgender care", "")
    assert evaluate(single(TaggedTerm("female")), doc)
    assert evaluate(single(TaggedTerm("male")), doc)
    assert evaluate(single(TaggedTerm("female-to-male transgender", quoted=True)), doc)


def test_mesh_terms_match_case_insensitively():
    doc = Article("6", "A title", "", mesh_terms=("Transgender Persons",))
    assert evaluate(single(TaggedTerm("transgender persons", FieldTag.MESH, quoted=True)), doc)
    assert not evaluate(single(TaggedTerm("transgender", FieldTag.MESH)), doc)


def test_and_or_semantics():
    doc = Article("7", "catgut only", "")
    both = BooleanQuery(((TaggedTerm("catgut"),), (TaggedTerm("missing"),)))
    either = BooleanQuery(((TaggedTerm("catgut"), TaggedTerm("missing")),))
    assert not evaluate(both, doc)
    assert evaluate(either, doc)


def test_local_search_simple_fixture():
    docs = [
        Article("d1", "stainless steel instruments", ""),
        Article("d2", "catgut suture trial", "catgut absorbed faster"),
        Article("d3", "synthetic polymers", ""),
    ]
    corpus = Corpus(docs)
    hits = local_search(corpus, parse_query("(catgut[tiab])"))
    assert [a.external_id for a in hits] == ["d2"]


def test_local_search_empty_corpus():
    assert local_search(Corpus([]), parse_query("(anything[tiab])")) == []


def test_local_search_returns_corpus_order():
    docs = [Article(str(i), "shared token study", "") for i in range(5)]
    hits = local_search(Corpus(docs), single(TaggedTerm("shared")))
    assert [a.external_id for a in hits] == [str(i) for i in range(5)]


def test_local_search_equals_naive_scan_on_random_corpus():
    rng = random.Random(42)
    corpus = random_corpus(rng, n_docs=300)
    for _ in range(60):
        query = random_query(rng)
        indexed = [a.external_id for a in local_search(corpus, query)]
        scanned = [a.external_id for a in naive_scan(corpus, query)]
        assert indexed == scanned


def test_adding_a_group_never_grows_results():
    rng = random.Random(8)
    corpus = random_corpus(rng, n_docs=200)
    for _ in range(40):
        query = random_query(rng, max_groups=2)
        narrowed = BooleanQuery(query.groups + ((rng.choice(rng.choice(query.groups)),),))
        base_ids = {a.external_id for a in local_search(corpus, query)}
        narrowed_ids = {a.external_id for a in local_search(corpus, narrowed)}
        assert narrowed_ids <= base_ids


def test_load_corpus_round_trip(tmp_path, golden_dir):
    corpus = load_corpus(golden_dir / "corpus.jsonl")
    assert len(corpus) == 10
    assert corpus.articles[0].external_id == "100001"
    assert "Transgender Persons" in corpus.articles[0].mesh_terms


def test_load_corpus_rejects_missing_fields(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text('{"pmid": "1"}\n', "utf-8")
    with pytest.raises(MalformedLine):
        load_corpus(path)


def test_indexes_consistent_with_rebuild(golden_dir):
    corpus = load_corpus(golden_dir / "corpus.jsonl")
    rebuilt = Corpus(corpus.articles)
    assert rebuilt._postings == corpus._postings
    assert rebuilt._mesh == corpus._mesh
