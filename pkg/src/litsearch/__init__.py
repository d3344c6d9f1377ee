"""litsearch: search-strategy engine for systematic reviews.

Turns a research question plus optional sentinel articles into an
expanded, field-tagged boolean query, widens it until enough articles
match, re-ranks matches by semantic similarity, and records structured
reviewer feedback.
"""

__version__ = "0.1.0"

from .corpus import Article, Corpus, evaluate, load_corpus, local_search
from .embedding import HashedEmbedder, RankedArticle, cosine, rerank
from .entities import Entity, Origin, SentinelArticle, extract_entities, merge_entities
from .expansion import (
    ExpansionConfig,
    ExpansionEntry,
    ExpansionSet,
    build_expansion,
    mask_substitutes,
    vocabulary_extension,
)
from .feedback import FEEDBACK_CATEGORIES, FeedbackRecord, FeedbackStore, QuerySession
from .kg import Concept, ConceptGraph, FieldTag, load_graph, serialize_graph
from .pipeline import SearchEngine, SearchRequest, SearchResponse
from .query import (
    BooleanQuery,
    TaggedTerm,
    build_specific_query,
    parse_query,
    render,
    term_variants,
)
from .refine import LocalBackend, RefinementTrace, RemoteBackend, entity_relevance, refine_until

__all__ = [
    "Article",
    "BooleanQuery",
    "Concept",
    "ConceptGraph",
    "Corpus",
    "Entity",
    "ExpansionConfig",
    "ExpansionEntry",
    "ExpansionSet",
    "FEEDBACK_CATEGORIES",
    "FeedbackRecord",
    "FeedbackStore",
    "FieldTag",
    "HashedEmbedder",
    "LocalBackend",
    "Origin",
    "QuerySession",
    "RankedArticle",
    "RefinementTrace",
    "RemoteBackend",
    "SearchEngine",
    "SearchRequest",
    "SearchResponse",
    "SentinelArticle",
    "TaggedTerm",
    "build_expansion",
    "build_specific_query",
    "cosine",
    "entity_relevance",
    "evaluate",
    "extract_entities",
    "load_corpus",
    "load_graph",
    "local_search",
    "mask_substitutes",
    "merge_entities",
    "parse_query",
    "refine_until",
    "render",
    "rerank",
    "serialize_graph",
    "term_variants",
    "vocabulary_extension",
]
