"""End-to-end search pipeline: extract, merge, expand, build, widen,
re-rank, persist. Shared by the HTTP service and the CLI."""

from __future__ import annotations

import time
import uuid
from dataclasses import dataclass, field

from .config import AppConfig
from .corpus import Corpus, load_corpus
from .embedding import Embedder, HashedEmbedder, RankedArticle, rerank
from .entities import Entity, Origin, SentinelArticle, extract_entities, merge_entities
from .entrez import EntrezClient
from .errors import LitSearchError, PipelineError
from .expansion import ExpansionConfig, build_expansion
from .feedback import FeedbackStore, QuerySession
from .kg import ConceptGraph
from .query import query_terms, render
from .refine import LocalBackend, RefinementTrace, RemoteBackend, entity_relevance, refine_until


class RequestInvalid(LitSearchError):
    def __init__(self, errors: dict[str, str]):
        super().__init__("; ".join(f"{k}: {v}" for k, v in errors.items()))
        self.errors = errors

    def payload(self) -> dict:
        return {"error": "RequestInvalid", "fields": self.errors}


@dataclass
class SearchRequest:
    query: str
    sentinels: list[SentinelArticle] = field(default_factory=list)
    k: int = 5
    n_min: int = 20
    backend: str | None = None  # "local" | "remote"; None uses the config default
    corpus_path: str | None = None

    def validate(self) -> dict[str, str]:
        errors: dict[str, str] = {}
        if not self.query or not self.query.strip():
            errors["query"] = "query must be non-empty"
        if self.k < 1:
            errors["k"] = "k must be >= 1"
        if self.n_min < 1:
            errors["n_min"] = "n_min must be >= 1"
        if self.backend not in (None, "local", "remote"):
            errors["backend"] = "backend must be 'local' or 'remote'"
        for i, sentinel in enumerate(self.sentinels):
            if not sentinel.title.strip():
                errors[f"sentinels[{i}].title"] = "sentinel title must be non-empty"
        return errors

    @classmethod
    def from_json(cls, obj: dict) -> "SearchRequest":
        sentinels = [
            SentinelArticle(
                title=s.get("title", ""),
                abstract=s.get("abstract", "") or "",
                source_id=s.get("source_id"),
            )
            for s in obj.get("sentinels", []) or []
        ]
        return cls(
            query=obj.get("query", ""),
            sentinels=sentinels,
            k=int(obj.get("k", 5)),
            n_min=int(obj.get("n_min", 20)),
            backend=obj.get("backend"),
            corpus_path=obj.get("corpus_path"),
        )


@dataclass
class SearchResponse:
    query_id: str
    rendered_query: str
    trace: RefinementTrace
    results: list[RankedArticle]
    timing_ms: dict[str, float]

    def to_json(self) -> dict:
        return {
            "query_id": self.query_id,
            "rendered_query": self.rendered_query,
            "trace": self.trace.to_json(),
            "results": [r.to_json() for r in self.results],
            "timing_ms": {k: round(v, 3) for k, v in self.timing_ms.items()},
        }


class _Stage:
    """Times a pipeline stage and tags any failure with its name."""

    def __init__(self, name: str, timing: dict[str, float]):
        self.name = name
        self.timing = timing

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        self.timing[self.name] = (time.perf_counter() - self.start) * 1000.0
        if exc is not None and not isinstance(exc, PipelineError):
            raise PipelineError(self.name, exc) from exc
        return False


class SearchEngine:
    """Wires the pipeline to a graph, providers, backends, and storage."""

    def __init__(
        self,
        graph: ConceptGraph,
        store: FeedbackStore,
        config: AppConfig | None = None,
        embedder: Embedder | None = None,
        ner=None,
        mask_provider=None,
        corpus: Corpus | None = None,
        entrez: EntrezClient | None = None,
    ):
        self.graph = graph
        self.store = store
        self.config = config or AppConfig()
        self.embedder = embedder or HashedEmbedder()
        self.ner = ner
        self.mask_provider = mask_provider
        self._corpora: dict[str, Corpus] = {}
        if corpus is not None:
            self._corpora["__default__"] = corpus
        self._entrez = entrez

    def _corpus(self, path: str | None) -> Corpus:
        key = path or "__default__"
        if key not in self._corpora:
            actual = path or self.config.corpus_path
            if actual is None:
                raise ValueError("no corpus configured for the local backend")
            self._corpora[key] = load_corpus(actual)
        return self._corpora[key]

    def _backend(self, request: SearchRequest):
        choice = request.backend or self.config.backend
        if choice == "remote":
            if self._entrez is None:
                self._entrez = EntrezClient(
                    self.config.entrez_base_url,
                    api_key=self.config.entrez_api_key,
                    rate_limit=self.config.rate_limit_rps,
                )
            return RemoteBackend(self._entrez, retmax=self.config.retmax)
        return LocalBackend(self._corpus(request.corpus_path), retmax=self.config.retmax)

    def run_search(self, request: SearchRequest) -> SearchResponse:
        """Run the full pipeline and persist the session.

        With the fallback providers the response is reproducible from
        the graph, the config, and the request alone: identical inputs
        give byte-identical rendered queries and result order.
        """
        errors = request.validate()
        if errors:
            raise RequestInvalid(errors)
        timing: dict[str, float] = {}
        with _Stage("extract", timing):
            query_entities = extract_entities(request.query, self.graph, Origin.QUERY, self.ner)
            sentinel_entities: list[Entity] = []
            for sentinel in request.sentinels:
                sentinel_entities.extend(
                    extract_entities(sentinel.text, self.graph, Origin.SENTINEL, self.ner)
                )
            entities = merge_entities(query_entities, sentinel_entities)
        with _Stage("expand", timing):
            exp = build_expansion(
                entities,
                self.graph,
                self.embedder,
                request.query,
                request.sentinels,
                ExpansionConfig(
                    similarity_threshold=self.config.similarity_threshold,
                    max_mask_terms=self.config.max_mask_terms,
                    mask_provider=self.mask_provider,
                ),
            )
            entity_relevance(exp, self.embedder)
        with _Stage("retrieve", timing):
            backend = self._backend(request)
            final_query, articles, trace = refine_until(exp, backend, request.n_min)
        with _Stage("rerank", timing):
            results = rerank(
                articles,
                request.query,
                request.sentinels,
                request.k,
                self.embedder,
                highlight_terms=query_terms(final_query),
            )
        with _Stage("persist", timing):
            query_id = uuid.uuid4().hex
            session = QuerySession(
                query_id=query_id,
                query_text=request.query,
                rendered_query=render(final_query),
                ranked=tuple((r.article.external_id, r.score_percent) for r in results),
                sentinels=tuple(
                    {"title": s.title, "abstract": s.abstract, "source_id": s.source_id}
                    for s in request.sentinels
                ),
            )
            self.store.register_session(session)
        return SearchResponse(
            query_id=query_id,
            rendered_query=session.rendered_query,
            trace=trace,
            results=results,
            timing_ms=timing,
        )
