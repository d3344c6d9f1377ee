"""Key-term extraction from research queries and sentinel articles.

The default matcher is a dictionary longest-match over the concept
graph's labels: deterministic, no model downloads. An external NER
service can be plugged in through providers.HttpNerProvider; when it
fails or times out the dictionary matcher takes over.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from importlib import resources

from .errors import ProviderUnavailable
from .kg import ConceptGraph
from .textutils import normalize_label, tokenize_spans

logger = logging.getLogger(__name__)


class Origin(Enum):
    QUERY = "QUERY"
    SENTINEL = "SENTINEL"


@dataclass(frozen=True)
class Entity:
    surface: str
    concept_id: str | None
    origin: Origin
    relevance: float = 1.0  # scored later against the request context

    @property
    def normalized(self) -> str:
        return normalize_label(self.surface)

    def scored(self, relevance: float) -> "Entity":
        return replace(self, relevance=relevance)


@dataclass(frozen=True)
class SentinelArticle:
    title: str
    abstract: str = ""
    source_id: str | None = None

    @property
    def text(self) -> str:
        return f"{self.title} {self.abstract}".strip()


@lru_cache(maxsize=1)
def stopwords() -> frozenset[str]:
    raw = resources.files("litsearch").joinpath("data/stopwords.txt").read_text("utf-8")
    return frozenset(word.strip() for word in raw.splitlines() if word.strip())


def _is_modifier(token: str) -> bool:
    # Unmatched present-participle forms ("affirming", "emerging") read
    # as modifiers of an adjacent head noun, not key terms themselves.
    # Tokens that resolve in the graph are never filtered by this.
    return len(token) >= 6 and token.endswith("ing")


class _Dictionary:
    """Label token sequences indexed by first token, longest first."""

    def __init__(self, graph: ConceptGraph):
        self.by_first: dict[str, list[tuple[tuple[str, ...], str]]] = {}
        for key, concept_id in graph.label_index.items():
            token_seq = tuple(key.split())
            if token_seq:
                self.by_first.setdefault(token_seq[0], []).append((token_seq, concept_id))
        for entries in self.by_first.values():
            entries.sort(key=lambda item: len(item[0]), reverse=True)

    def match_at(self, tokens: list[str], position: int) -> tuple[int, str] | None:
        """Longest label match starting at position: (length, concept_id)."""
        for token_seq, concept_id in self.by_first.get(tokens[position], ()):
            if tuple(tokens[position:position + len(token_seq)]) == token_seq:
                return len(token_seq), concept_id
        return None


def _dictionary_for(graph: ConceptGraph) -> _Dictionary:
    cached = getattr(graph, "_entity_dictionary", None)
    if cached is None:
        cached = _Dictionary(graph)
        graph._entity_dictionary = cached
    return cached


def extract_entities(
    text: str,
    graph: ConceptGraph,
    origin: Origin,
    ner=None,
) -> list[Entity]:
    """Extract key terms from ``text`` in text order, without overlaps.

    Dictionary matches are longest-match, left to right; tokens the
    graph does not know are kept as unresolved entities unless they are
    stopwords or modifier-like. Duplicate normalized surfaces are
    dropped. ``ner`` is an optional external provider with
    ``extract(text) -> [(surface, start, end)]``.
    """
    if ner is not None:
        try:
            return _from_ner_spans(ner.extract(text), text, graph, origin)
        except ProviderUnavailable as exc:
            logger.warning("NER provider unavailable (%s); using dictionary matcher", exc)
    spans = tokenize_spans(text)
    tokens = [token for token, _, _ in spans]
    dictionary = _dictionary_for(graph)
    words = stopwords()
    out: list[Entity] = []
    seen: set[str] = set()
    i = 0
    while i < len(tokens):
        matched = dictionary.match_at(tokens, i)
        if matched:
            length, concept_id = matched
            surface = text[spans[i][1]:spans[i + length - 1][2]]
            entity = Entity(surface, concept_id, origin)
            i += length
        else:
            token = tokens[i]
            i += 1
            if token in words or _is_modifier(token):
                continue
            surface = text[spans[i - 1][1]:spans[i - 1][2]]
            entity = Entity(surface, None, origin)
        if entity.normalized not in seen:
            seen.add(entity.normalized)
            out.append(entity)
    return out


def _from_ner_spans(raw_spans, text: str, graph: ConceptGraph, origin: Origin) -> list[Entity]:
    out: list[Entity] = []
    seen: set[str] = set()
    for surface, start, end in sorted(raw_spans, key=lambda s: s[1]):
        if not surface or text[start:end] != surface:
            surface = text[start:end]
        if not surface.strip():
            continue
        concept = graph.lookup(surface)
        entity = Entity(surface, concept.id if concept else None, origin)
        if entity.normalized and entity.normalized not in seen:
            seen.add(entity.normalized)
            out.append(entity)
    return out


def merge_entities(
    query_entities: list[Entity],
    sentinel_entities: list[Entity],
) -> list[Entity]:
    """Union with duplicates removed on normalized surface.

    Query entities come first and win conflicts, so widening removes
    sentinel-derived terms before it touches the user's own wording.
    """
    out: list[Entity] = []
    seen: set[str] = set()
    for entity in list(query_entities) + list(sentinel_entities):
        if entity.normalized not in seen:
            seen.add(entity.normalized)
            out.append(entity)
    return out
