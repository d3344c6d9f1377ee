"""Embedding, cosine similarity, and article re-ranking.

The fallback embedder is a hashed bag of words: every token is hashed
into one of 256 buckets, counts are L2-normalized. It is deterministic
across runs and processes, which makes rendered queries and rankings
reproducible without any model weights. External sentence-embedding
services plug in through providers.HttpEmbeddingProvider.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Protocol, Sequence

import numpy as np

from .errors import DimensionMismatch
from .textutils import tokenize

if TYPE_CHECKING:
    from .corpus import Article

FALLBACK_DIM = 256


class Embedder(Protocol):
    dimension: int

    def embed(self, text: str) -> np.ndarray: ...


class HashedEmbedder:
    """Deterministic hashed bag-of-words embedder."""

    def __init__(self, dimension: int = FALLBACK_DIM):
        self.dimension = dimension

    def _bucket(self, token: str) -> int:
        digest = hashlib.md5(token.encode("utf-8")).hexdigest()
        return int(digest, 16) % self.dimension

    def embed(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dimension)
        for token in tokenize(text):
            vec[self._bucket(token)] += 1.0
        norm = np.linalg.norm(vec)
        return vec / norm if norm > 0 else vec

    def embed_batch(self, texts: Iterable[str]) -> list[np.ndarray]:
        return [self.embed(text) for text in texts]


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Standard cosine similarity; 0.0 when either vector is zero."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionMismatch(f"dimensions differ: {a.shape} vs {b.shape}")
    norm_a = np.linalg.norm(a)
    norm_b = np.linalg.norm(b)
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    return float(np.dot(a, b) / (norm_a * norm_b))


def reference_vector(query: str, sentinel_texts: Sequence[str], embedder: Embedder) -> np.ndarray:
    """Unit-norm mean of the query embedding and each sentinel embedding."""
    vectors = [embedder.embed(query)] + [embedder.embed(text) for text in sentinel_texts]
    mean = np.mean(vectors, axis=0)
    norm = np.linalg.norm(mean)
    return mean / norm if norm > 0 else mean


@dataclass(frozen=True)
class RankedArticle:
    article: "Article"
    score_percent: float  # [0, 100], displayed with two decimals
    highlights: tuple[tuple[int, int], ...] = ()

    def to_json(self) -> dict:
        return {
            "external_id": self.article.external_id,
            "title": self.article.title,
            "abstract": self.article.abstract,
            "journal": self.article.journal,
            "mesh_terms": list(self.article.mesh_terms),
            "score_percent": round(self.score_percent, 2),
            "highlights": [list(span) for span in self.highlights],
        }


def highlight_spans(abstract: str, terms: Sequence[str]) -> tuple[tuple[int, int], ...]:
    """Non-overlapping character spans where terms occur in the abstract.

    A trailing ``*`` on a term marks a prefix: the span covers the whole
    matched word. Matching is case-insensitive at word boundaries.
    """
    candidates: list[tuple[int, int]] = []
    for term in terms:
        term = term.strip()
        if not term:
            continue
        if term.endswith("*"):
            pattern = r"(?<![A-Za-z0-9])" + re.escape(term[:-1]) + r"[A-Za-z0-9]*"
        else:
            pattern = r"(?<![A-Za-z0-9])" + re.escape(term) + r"(?![A-Za-z0-9])"
        for match in re.finditer(pattern, abstract, re.IGNORECASE):
            if match.start() < match.end():
                candidates.append((match.start(), match.end()))
    candidates.sort(key=lambda span: (span[0], span[0] - span[1]))
    spans: list[tuple[int, int]] = []
    last_end = -1
    for start, end in candidates:
        if start >= last_end:
            spans.append((start, end))
            last_end = end
    return tuple(spans)


def rerank(
    articles: Sequence["Article"],
    query: str,
    sentinels: Sequence,
    k: int,
    embedder: Embedder,
    highlight_terms: Sequence[str] | None = None,
) -> list[RankedArticle]:
    """Top-k articles by similarity to the query + sentinel centroid.

    Scores are ``round(100 * max(0, cosine), 2)``; ties break on
    external id ascending, so the ranking is independent of input
    order. ``highlight_terms`` defaults to the query's tokens.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    reference = reference_vector(query, [s.text for s in sentinels], embedder)
    terms = list(highlight_terms) if highlight_terms is not None else tokenize(query)
    ranked = []
    for article in articles:
        vec = embedder.embed(f"{article.title} {article.abstract}".strip())
        score = round(100.0 * max(0.0, cosine(vec, reference)), 2)
        ranked.append(RankedArticle(article, score, highlight_spans(article.abstract, terms)))
    ranked.sort(key=lambda r: (-r.score_percent, r.article.external_id))
    return ranked[:k]
