"""Random fixture builders and independent oracles shared across tests.

The oracles here intentionally reimplement behavior with the dumbest
possible algorithm (linear scans, explicit BFS) so they stay
independent of the indexed or incremental paths they check.
"""

from __future__ import annotations

import random

from litsearch.corpus import Article, Corpus, evaluate
from litsearch.kg import FieldTag
from litsearch.query import BooleanQuery, TaggedTerm

VOCAB = [
    "gender", "surgery", "surgeries", "transgender", "individuals", "chest",
    "reconstruction", "outcomes", "cohort", "hormone", "therapy", "infection",
    "wound", "sutures", "catgut", "antibiotic", "screening", "trial", "registry",
    "anesthesia", "recovery", "complication", "referral", "survey", "clinic",
    "pediatric", "adult", "female", "male", "dysphoria", "identity", "affirmation",
    "procedure", "stricture", "fistula", "satisfaction", "wellbeing", "protocol",
    "equipment", "materials", "veterinary", "stewardship", "airway", "follow",
    "baseline", "outcome", "risk", "factor", "rates", "care",
]

MESH_VOCAB = ["Alpha Topic", "Beta Topic", "Gamma Topic", "Delta Topic"]


def random_corpus(rng: random.Random, n_docs: int, vocab: list[str] | None = None,
                  doc_len: int = 18) -> Corpus:
    vocab = vocab or VOCAB
    articles = []
    for i in range(n_docs):
        tokens = rng.choices(vocab, k=doc_len)
        title = " ".join(tokens[:5]).capitalize()
        abstract = " ".join(tokens[5:]) + "."
        mesh = tuple(rng.sample(MESH_VOCAB, k=rng.randint(0, 2)))
        articles.append(Article(external_id=f"{900000 + i}", title=title,
                                abstract=abstract, mesh_terms=mesh))
    return Corpus(articles)


def random_term(rng: random.Random, vocab: list[str] | None = None) -> TaggedTerm:
    vocab = vocab or VOCAB
    kind = rng.random()
    if kind < 0.15:
        return TaggedTerm(rng.choice(MESH_VOCAB), FieldTag.MESH, quoted=True)
    if kind < 0.35:
        word = rng.choice(vocab)
        return TaggedTerm(word[: max(3, len(word) - 2)], wildcard=True)
    if kind < 0.55:
        phrase = " ".join(rng.sample(vocab, k=rng.randint(2, 3)))
        return TaggedTerm(phrase, quoted=True)
    return TaggedTerm(rng.choice(vocab), quoted=rng.random() < 0.3)


def random_query(rng: random.Random, max_groups: int = 3, max_terms: int = 4,
                 vocab: list[str] | None = None) -> BooleanQuery:
    groups = tuple(
        tuple(random_term(rng, vocab) for _ in range(rng.randint(1, max_terms)))
        for _ in range(rng.randint(1, max_groups))
    )
    return BooleanQuery(groups)


def naive_scan(corpus: Corpus, query: BooleanQuery) -> list[Article]:
    """Oracle for local_search: evaluate every article, keep corpus order."""
    return [article for article in corpus.articles if evaluate(query, article)]


def naive_bfs(edges: set[tuple[str, str]], start: str, max_hops: int) -> set[str]:
    """Oracle for graph traversal: undirected BFS without the library."""
    adjacency: dict[str, set[str]] = {}
    for a, b in edges:
        adjacency.setdefault(a, set()).add(b)
        adjacency.setdefault(b, set()).add(a)
    frontier = {start}
    seen = {start}
    found: set[str] = set()
    for _ in range(max_hops):
        frontier = {n for node in frontier for n in adjacency.get(node, ()) if n not in seen}
        seen |= frontier
        found |= frontier
    return found
