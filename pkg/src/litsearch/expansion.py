"""Per-entity expansion: vocabulary terms from the graph, substitutes
from a masked-term provider, both bundled for query construction."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .embedding import Embedder, cosine, reference_vector
from .entities import Entity, SentinelArticle
from .errors import EmptyExpansion, ProviderUnavailable
from .kg import ConceptGraph, FieldTag
from .textutils import normalize_label


@dataclass
class ExpansionEntry:
    entity: Entity
    kg_terms: list[tuple[str, FieldTag]] = field(default_factory=list)
    mask_terms: list[str] = field(default_factory=list)


@dataclass
class ExpansionSet:
    """Ordered expansion entries plus the request's context embedding."""

    entries: list[ExpansionEntry]
    context_embedding: np.ndarray

    def surfaces(self) -> list[str]:
        return [entry.entity.surface for entry in self.entries]


@dataclass
class ExpansionConfig:
    similarity_threshold: float = 0.5
    max_mask_terms: int = 3
    mask_provider: object | None = None  # defaults to GraphSynonymFiller


def _term_key(label: str) -> str:
    """Dedup key for expansion labels; a trailing ``*`` (wildcard stem)
    keeps a label distinct from its exact form."""
    key = normalize_label(label)
    return key + "*" if label.rstrip().endswith("*") else key


def vocabulary_extension(
    entity: Entity,
    graph: ConceptGraph,
    embedder: Embedder,
    context: np.ndarray,
    threshold: float,
) -> list[tuple[str, FieldTag]]:
    """Two-hop neighbor labels semantically close to the request context.

    Candidates are the preferred labels and synonyms of every concept
    within two hops of the entity's concept. Labels whose embedding
    scores below ``threshold`` against the context are dropped; the
    rest are sorted by similarity, ties lexicographic. Unresolved
    entities expand to nothing.
    """
    if not -1.0 <= threshold <= 1.0:
        raise ValueError("threshold must be in [-1, 1]")
    if entity.concept_id is None:
        return []
    own = entity.normalized
    scored: list[tuple[float, str, FieldTag]] = []
    seen: set[str] = set()
    for concept in graph.neighbors(entity.concept_id, max_hops=2):
        for label in concept.labels():
            key = _term_key(label)
            if key == own or key in seen:
                continue
            seen.add(key)
            similarity = cosine(embedder.embed(label), context)
            if similarity >= threshold:
                scored.append((similarity, label, concept.field_tag_hint))
    scored.sort(key=lambda item: (-item[0], item[1]))
    return [(label, tag) for _, label, tag in scored]


def mask_substitutes(
    entity: Entity,
    context_text: str,
    provider,
    max_terms: int,
) -> list[str]:
    """Substitute terms for the entity masked inside its context.

    The provider sees the context with the entity's span marked and
    returns ranked replacements. Failures degrade to an empty list;
    this step never sinks the pipeline.
    """
    if max_terms < 0:
        raise ValueError("max_terms must be >= 0")
    if max_terms == 0:
        return []
    span = _find_span(context_text, entity.surface)
    try:
        candidates = provider.fill(context_text, span, entity.surface, top_k=max_terms)
    except ProviderUnavailable:
        return []
    own = entity.normalized
    out: list[str] = []
    seen: set[str] = set()
    for label in candidates:
        label = " ".join(str(label).split())
        key = _term_key(label)
        if not label or key == own or key in seen:
            continue
        seen.add(key)
        out.append(label)
        if len(out) == max_terms:
            break
    return out


def _find_span(text: str, surface: str) -> tuple[int, int]:
    start = text.lower().find(surface.lower())
    if start == -1:
        return (0, 0)
    return (start, start + len(surface))


def context_embedding(
    query: str,
    sentinels: list[SentinelArticle],
    embedder: Embedder,
) -> np.ndarray:
    """Unit-norm mean of the query and sentinel embeddings.

    Same centroid recipe the re-ranker scores against, so expansion
    filtering and ranking share one notion of "the request".
    """
    return reference_vector(query, [s.text for s in sentinels], embedder)


def build_expansion(
    entities: list[Entity],
    graph: ConceptGraph,
    embedder: Embedder,
    query: str,
    sentinels: list[SentinelArticle],
    config: ExpansionConfig | None = None,
) -> ExpansionSet:
    """Expansion entries for every entity, in merged-entity order."""
    if not entities:
        raise EmptyExpansion("cannot expand an empty entity list")
    config = config or ExpansionConfig()
    provider = config.mask_provider
    if provider is None:
        from .providers import GraphSynonymFiller

        provider = GraphSynonymFiller(graph)
    context = context_embedding(query, sentinels, embedder)
    mask_context = " ".join([query] + [s.text for s in sentinels]).strip()
    entries = []
    for entity in entities:
        entries.append(
            ExpansionEntry(
                entity=entity,
                kg_terms=vocabulary_extension(
                    entity, graph, embedder, context, config.similarity_threshold
                ),
                mask_terms=mask_substitutes(
                    entity, mask_context, provider, config.max_mask_terms
                ),
            )
        )
    return ExpansionSet(entries=entries, context_embedding=context)
