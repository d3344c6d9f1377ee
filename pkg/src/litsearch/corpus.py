"""Offline article corpus with index-backed boolean search.

evaluate() defines the dialect semantics one article at a time and is
deliberately index-free, so tests can use it as an oracle against the
positional-index path in local_search().
"""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import MalformedLine
from .query import BooleanQuery, TaggedTerm
from .kg import FieldTag
from .textutils import normalize_label, tokenize


@dataclass(frozen=True)
class Article:
    external_id: str
    title: str
    abstract: str = ""
    mesh_terms: tuple[str, ...] = ()
    journal: str | None = None

    @property
    def tiab(self) -> str:
        return f"{self.title} {self.abstract}".strip()

    def to_json(self) -> dict:
        return {
            "pmid": self.external_id,
            "title": self.title,
            "abstract": self.abstract,
            "mesh": list(self.mesh_terms),
            "journal": self.journal,
        }


def _phrase_in(tokens: list[str], phrase: list[str]) -> bool:
    if not phrase:
        return False
    if len(phrase) == 1:
        return phrase[0] in tokens
    limit = len(tokens) - len(phrase)
    for i in range(limit + 1):
        if tokens[i:i + len(phrase)] == phrase:
            return True
    return False


def _term_matches(term: TaggedTerm, tokens: list[str], mesh_norm: list[str]) -> bool:
    if term.tag == FieldTag.MESH:
        key = normalize_label(term.text)
        if term.wildcard:
            return any(entry.startswith(key) for entry in mesh_norm)
        return key in mesh_norm
    if term.wildcard:
        prefix = term.text.lower()
        return any(token.startswith(prefix) for token in tokens)
    return _phrase_in(tokens, tokenize(term.text))


def evaluate(query: BooleanQuery, article: Article) -> bool:
    """Dialect semantics for a single article.

    Title and abstract share one token stream; quoted phrases must be
    contiguous token runs; a wildcard is a token prefix match on the
    stem; MESH terms compare case-insensitively against the article's
    vocabulary terms. Groups OR their terms, the root ANDs the groups.
    """
    tokens = tokenize(article.tiab)
    mesh_norm = [normalize_label(entry) for entry in article.mesh_terms]
    return all(
        any(_term_matches(term, tokens, mesh_norm) for term in group)
        for group in query.groups
    )


class Corpus:
    """Immutable indexed article collection.

    Indexes are built once at construction: a positional title+abstract
    index for phrase and prefix matching, and a normalized term index
    for vocabulary tags. Safe for concurrent readers.
    """

    def __init__(self, articles: list[Article]):
        self.articles = list(articles)
        self._postings: dict[str, dict[int, list[int]]] = {}
        self._mesh: dict[str, set[int]] = {}
        for ordinal, article in enumerate(self.articles):
            for position, token in enumerate(tokenize(article.tiab)):
                self._postings.setdefault(token, {}).setdefault(ordinal, []).append(position)
            for entry in article.mesh_terms:
                self._mesh.setdefault(normalize_label(entry), set()).add(ordinal)
        self._vocabulary = sorted(self._postings)
        self._mesh_vocabulary = sorted(self._mesh)

    def __len__(self) -> int:
        return len(self.articles)

    def _prefix_range(self, vocabulary: list[str], prefix: str) -> list[str]:
        lo = bisect.bisect_left(vocabulary, prefix)
        hi = bisect.bisect_left(vocabulary, prefix + "￿")
        return vocabulary[lo:hi]

    def _docs_for_phrase(self, phrase: list[str]) -> set[int]:
        if not phrase:
            return set()
        postings = [self._postings.get(token) for token in phrase]
        if any(p is None for p in postings):
            return set()
        if len(phrase) == 1:
            return set(postings[0])
        candidates = set(postings[0])
        for p in postings[1:]:
            candidates &= set(p)
        matched = set()
        for doc in candidates:
            rest = [set(p[doc]) for p in postings[1:]]
            for start in postings[0][doc]:
                if all(start + offset + 1 in positions for offset, positions in enumerate(rest)):
                    matched.add(doc)
                    break
        return matched

    def _docs_for_term(self, term: TaggedTerm) -> set[int]:
        if term.tag == FieldTag.MESH:
            key = normalize_label(term.text)
            if term.wildcard:
                docs: set[int] = set()
                for entry in self._prefix_range(self._mesh_vocabulary, key):
                    docs |= self._mesh[entry]
                return docs
            return set(self._mesh.get(key, ()))
        if term.wildcard:
            docs = set()
            for token in self._prefix_range(self._vocabulary, term.text.lower()):
                docs |= self._postings[token].keys()
            return docs
        return self._docs_for_phrase(tokenize(term.text))

    def search(self, query: BooleanQuery) -> list[Article]:
        """Articles matching the query, in corpus order."""
        result: set[int] | None = None
        for group in query.groups:
            group_docs: set[int] = set()
            for term in group:
                group_docs |= self._docs_for_term(term)
            result = group_docs if result is None else result & group_docs
            if not result:
                return []
        return [self.articles[ordinal] for ordinal in sorted(result or ())]


def local_search(corpus: Corpus, query: BooleanQuery) -> list[Article]:
    return corpus.search(query)


def load_corpus(path: str | Path) -> Corpus:
    """Load a JSONL corpus: {"pmid", "title", "abstract", "mesh", "journal"?}."""
    articles: list[Article] = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedLine(line_no, f"invalid JSON: {exc.msg}") from None
            pmid = obj.get("pmid")
            title = obj.get("title")
            if not pmid or not title:
                raise MalformedLine(line_no, "articles need 'pmid' and 'title'")
            articles.append(
                Article(
                    external_id=str(pmid),
                    title=title,
                    abstract=obj.get("abstract", "") or "",
                    mesh_terms=tuple(obj.get("mesh", []) or []),
                    journal=obj.get("journal"),
                )
            )
    return Corpus(articles)
