"""Command-line interface: ingest-kg, search, eval, serve."""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from .config import AppConfig
from .entities import SentinelArticle
from .errors import LitSearchError
from .feedback import FeedbackRecord, FeedbackStore, compute_relevance
from .kg import load_graph, serialize_graph
from .pipeline import SearchEngine, SearchRequest
from .providers import (
    GraphSynonymFiller,
    HttpEmbeddingProvider,
    HttpMaskedTermProvider,
    HttpNerProvider,
    StaticMaskProvider,
)
from .embedding import HashedEmbedder


def _fail_on_error(fn):
    """Print a machine-readable error to stderr and exit non-zero."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except LitSearchError as exc:
            click.echo(json.dumps(exc.payload()), err=True)
            sys.exit(1)
        except (OSError, ValueError) as exc:
            click.echo(json.dumps({"error": type(exc).__name__, "message": str(exc)}), err=True)
            sys.exit(1)

    return wrapper


def _build_engine(config: AppConfig) -> tuple[SearchEngine, FeedbackStore]:
    if not config.graph_path:
        raise ValueError("no graph configured; pass --graph or set graph_path in the config")
    graph = load_graph(config.graph_path)
    store = FeedbackStore(config.feedback_log, config.sessions_log)
    embedder = HashedEmbedder()
    if config.embed_url:
        embedder = HttpEmbeddingProvider(config.embed_url, fallback=HashedEmbedder())
    ner = HttpNerProvider(config.ner_url) if config.ner_url else None
    filler = GraphSynonymFiller(graph)
    if config.mask_terms_path:
        filler = StaticMaskProvider.from_file(config.mask_terms_path, fallback=filler)
    if config.fill_url:
        filler = HttpMaskedTermProvider(config.fill_url, fallback=filler)
    engine = SearchEngine(
        graph, store, config, embedder=embedder, ner=ner, mask_provider=filler
    )
    return engine, store


@click.group()
def main():
    """Search-strategy engine for systematic reviews."""


@main.command("ingest-kg")
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False),
              help="Where to write the validated, canonicalized graph.")
@_fail_on_error
def ingest_kg(source: str, out: str):
    """Validate a JSONL concept graph and pin its version."""
    graph = load_graph(source)
    Path(out).write_text(serialize_graph(graph), "utf-8")
    click.echo(json.dumps({
        "version": graph.version,
        "concepts": len(graph.concepts),
        "edges": len(graph.edges),
        "out": out,
    }))


def _read_sentinels(path: str | None) -> list[SentinelArticle]:
    if not path:
        return []
    sentinels = []
    for line in Path(path).read_text("utf-8").splitlines():
        if line.strip():
            obj = json.loads(line)
            sentinels.append(SentinelArticle(
                title=obj.get("title", ""),
                abstract=obj.get("abstract", "") or "",
                source_id=obj.get("source_id"),
            ))
    return sentinels


@main.command("search")
@click.option("--query", required=True, help="Research question text.")
@click.option("--sentinel-file", type=click.Path(exists=True, dir_okay=False),
              help="JSONL of sentinel articles: {title, abstract, source_id?}.")
@click.option("--corpus", type=click.Path(exists=True, dir_okay=False),
              help="Search a local JSONL corpus instead of the remote backend.")
@click.option("--remote", is_flag=True, help="Search the configured remote backend.")
@click.option("--graph", type=click.Path(exists=True, dir_okay=False),
              help="Concept graph JSONL (overrides the config).")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--k", type=int, default=None, help="Results to return (default 5).")
@click.option("--n-min", type=int, default=None,
              help="Minimum hits before the query stops widening (default 20).")
@click.option("--json", "as_json", is_flag=True, help="Print the full response as JSON.")
@_fail_on_error
def search(query, sentinel_file, corpus, remote, graph, config_path, k, n_min, as_json):
    """Build, widen, and run a search; print the results."""
    if corpus and remote:
        raise click.UsageError("--corpus and --remote are mutually exclusive")
    config = AppConfig.load(config_path)
    if graph:
        config.graph_path = graph
    if corpus:
        config.corpus_path = corpus
        config.backend = "local"
    if remote:
        config.backend = "remote"
    engine, _ = _build_engine(config)
    request = SearchRequest(
        query=query,
        sentinels=_read_sentinels(sentinel_file),
        k=k if k is not None else config.k,
        n_min=n_min if n_min is not None else config.n_min,
    )
    response = engine.run_search(request)
    if as_json:
        click.echo(json.dumps(response.to_json(), indent=2))
        return
    click.echo(response.rendered_query)
    for rank, result in enumerate(response.results, start=1):
        click.echo(f"{rank}. [{result.score_percent:.2f}] "
                   f"{result.article.external_id}  {result.article.title}")


@main.command("eval")
@click.option("--requests", "requests_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="JSONL with one query session per line (needs query_id).")
@click.option("--judgments", "judgments_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="JSONL feedback log.")
@_fail_on_error
def eval_cmd(requests_path: str, judgments_path: str):
    """Compute the relevance percentage report for judged queries."""
    known_ids = set()
    for line in Path(requests_path).read_text("utf-8").splitlines():
        if line.strip():
            known_ids.add(json.loads(line)["query_id"])
    records = []
    for line in Path(judgments_path).read_text("utf-8").splitlines():
        if line.strip():
            record = FeedbackRecord.from_json(json.loads(line))
            if record.query_id in known_ids:
                records.append(record)
    click.echo(json.dumps(compute_relevance(records).to_json(), indent=2))


@main.command("serve")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@_fail_on_error
def serve(config_path, host, port):
    """Start the HTTP service."""
    import uvicorn

    from .service import create_app

    config = AppConfig.load(config_path)
    engine, store = _build_engine(config)
    app = create_app(engine, store, config)
    uvicorn.run(app, host=host or config.host, port=port or config.port)


if __name__ == "__main__":
    main()
