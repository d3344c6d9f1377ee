"""HTTP surface over the search pipeline.

Routes:
  POST /api/search            run the pipeline, returns SearchResponse
  GET  /api/session/{id}      stored session plus latest judgments
  POST /api/feedback          record a judgment (204)
  GET  /api/metrics           relevance percentage report
  GET  /api/health            build info, graph version, provider modes

Validation problems answer 400 with field messages, unknown sessions
404, backend failures 502 with the failing stage named.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import __version__
from .config import AppConfig
from .errors import (
    BackendError,
    LitSearchError,
    PipelineError,
    ProviderUnavailable,
    UnknownSession,
)
from .feedback import FeedbackRecord, FeedbackStore
from .pipeline import RequestInvalid, SearchEngine, SearchRequest
from .providers import provider_status


class SentinelIn(BaseModel):
    title: str = Field(min_length=1)
    abstract: str = ""
    source_id: str | None = None


class SearchIn(BaseModel):
    query: str = Field(min_length=1)
    sentinels: list[SentinelIn] = []
    k: int = Field(default=5, ge=1)
    n_min: int = Field(default=20, ge=1)
    backend: str | None = None
    corpus_path: str | None = None


class FeedbackIn(BaseModel):
    query_id: str = Field(min_length=1)
    article_id: str = Field(min_length=1)
    relevant: bool
    categories: dict[str, bool] = {}
    missing_concepts: str = ""


def create_app(engine: SearchEngine, store: FeedbackStore,
               config: AppConfig | None = None) -> FastAPI:
    config = config or AppConfig()
    app = FastAPI(title="litsearch", version=__version__)

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        fields = {
            ".".join(str(part) for part in err["loc"] if part != "body"): err["msg"]
            for err in exc.errors()
        }
        return JSONResponse({"error": "RequestInvalid", "fields": fields}, status_code=400)

    @app.exception_handler(LitSearchError)
    async def on_litsearch_error(request: Request, exc: LitSearchError):
        status = 500
        if isinstance(exc, (RequestInvalid,)):
            status = 400
        elif isinstance(exc, UnknownSession):
            status = 404
        elif isinstance(exc, (BackendError, ProviderUnavailable)):
            status = 502
        elif isinstance(exc, PipelineError):
            status = 400 if isinstance(exc.cause, RequestInvalid) else 502
        return JSONResponse(exc.payload(), status_code=status)

    @app.post("/api/search")
    def api_search(payload: SearchIn):
        request = SearchRequest.from_json(payload.model_dump())
        return engine.run_search(request).to_json()

    @app.get("/api/session/{query_id}")
    def api_session(query_id: str):
        session = store.get_session(query_id)
        judgments = {
            record.article_id: record.to_json()
            for record in store.judgments(query_id)
        }
        return {"session": session.to_json(), "judgments": judgments}

    @app.post("/api/feedback", status_code=204)
    def api_feedback(payload: FeedbackIn):
        try:
            record = FeedbackRecord(
                query_id=payload.query_id,
                article_id=payload.article_id,
                relevant=payload.relevant,
                categories=payload.categories,
                missing_concepts=payload.missing_concepts,
            )
        except ValueError as exc:
            return JSONResponse(
                {"error": "RequestInvalid", "fields": {"categories": str(exc)}},
                status_code=400,
            )
        store.record_feedback(record)
        return Response(status_code=204)

    @app.get("/api/metrics")
    def api_metrics():
        return store.relevance_report().to_json()

    @app.get("/api/health")
    def api_health():
        return {
            "status": "ok",
            "version": __version__,
            "graph_version": engine.graph.version,
            "graph_concepts": len(engine.graph.concepts),
            "backend": config.backend,
            "providers": provider_status(engine.ner, engine.mask_provider, engine.embedder),
        }

    webui = Path(config.webui_dir) if config.webui_dir else None
    if webui and webui.is_dir():
        app.mount("/", StaticFiles(directory=webui, html=True), name="webui")
    return app
