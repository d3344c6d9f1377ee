"""Iterative query widening: drop the least relevant entity until the
hit count clears the floor or one entity remains."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Protocol, Sequence

from .corpus import Article, Corpus, local_search
from .embedding import Embedder, cosine
from .entities import Entity
from .errors import BackendError
from .expansion import ExpansionSet
from .query import BooleanQuery, build_specific_query, render


class SearchOutcome(NamedTuple):
    articles: list[Article]
    hit_count: int


class SearchBackend(Protocol):
    def run(self, query: BooleanQuery) -> SearchOutcome: ...


class LocalBackend:
    """Backend over an in-memory corpus; hit_count is the exact match count."""

    def __init__(self, corpus: Corpus, retmax: int = 100):
        self.corpus = corpus
        self.retmax = retmax

    def run(self, query: BooleanQuery) -> SearchOutcome:
        matches = local_search(self.corpus, query)
        return SearchOutcome(matches[: self.retmax], len(matches))


class RemoteBackend:
    """Backend over the Entrez-style client; hit_count is the server total."""

    def __init__(self, client, retmax: int = 100):
        self.client = client
        self.retmax = retmax

    def run(self, query: BooleanQuery) -> SearchOutcome:
        ids, count = self.client.search_with_count(render(query), self.retmax)
        articles = self.client.fetch(ids).articles if ids else []
        return SearchOutcome(articles, count)


@dataclass(frozen=True)
class TraceIteration:
    query: BooleanQuery
    rendered: str
    hit_count: int
    removed_entity: Entity | None  # entity dropped to form the next iteration

    def to_json(self) -> dict:
        return {
            "rendered": self.rendered,
            "hit_count": self.hit_count,
            "removed_entity": self.removed_entity.surface if self.removed_entity else None,
        }


@dataclass
class RefinementTrace:
    iterations: list[TraceIteration]

    def to_json(self) -> list[dict]:
        return [iteration.to_json() for iteration in self.iterations]


def entity_relevance(exp: ExpansionSet, embedder: Embedder) -> ExpansionSet:
    """Score every entity against the context embedding, in place.

    relevance = (cosine(embed(surface), context) + 1) / 2, so scores
    live in [0, 1] regardless of embedding sign.
    """
    for entry in exp.entries:
        similarity = cosine(embedder.embed(entry.entity.surface), exp.context_embedding)
        entry.entity = entry.entity.scored((similarity + 1.0) / 2.0)
    return exp


def _removal_index(entries: Sequence) -> int:
    # Lowest relevance loses; on ties the later entity goes, which keeps
    # the user's own wording in the query longest.
    lowest = min(entry.entity.relevance for entry in entries)
    for i in range(len(entries) - 1, -1, -1):
        if entries[i].entity.relevance == lowest:
            return i
    raise AssertionError("unreachable")


def refine_until(
    exp: ExpansionSet,
    backend: SearchBackend,
    n_min: int,
) -> tuple[BooleanQuery, list[Article], RefinementTrace]:
    """Widen the query until at least ``n_min`` articles match.

    Starts from the most specific query over all entities. While the
    hit count is short and more than one entity survives, the lowest
    relevance entity is removed and the query rebuilt, so at most one
    retrieval runs per entity. The final entity is never removed: the
    last query always has at least one group. Backend failures carry
    the trace completed so far.
    """
    if n_min < 1:
        raise ValueError("n_min must be >= 1")
    survivors = list(exp.entries)
    iterations: list[TraceIteration] = []
    while True:
        query = build_specific_query(ExpansionSet(survivors, exp.context_embedding))
        rendered = render(query)
        try:
            outcome = backend.run(query)
        except BackendError as exc:
            exc.trace = RefinementTrace(iterations)
            raise
        if outcome.hit_count >= n_min or len(survivors) == 1:
            iterations.append(TraceIteration(query, rendered, outcome.hit_count, None))
            return query, outcome.articles, RefinementTrace(iterations)
        removed = survivors.pop(_removal_index(survivors))
        iterations.append(TraceIteration(query, rendered, outcome.hit_count, removed.entity))
