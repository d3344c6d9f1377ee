"""Record API responses for the frontend contract tests.

Runs the bundled worked-example search against the real service (in
process), submits the 4-of-5 feedback flow, and snapshots the JSON the
frontend tests replay. Rerun after changing response shapes:

    python3 scripts/record_webui_fixtures.py
"""

from __future__ import annotations

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from litsearch.config import AppConfig
from litsearch.feedback import FeedbackStore
from litsearch.kg import load_graph
from litsearch.pipeline import SearchEngine
from litsearch.providers import StaticMaskProvider
from litsearch.service import create_app

ROOT = Path(__file__).resolve().parent.parent
GOLDEN = ROOT / "fixtures" / "golden"
OUT = ROOT / "frontend" / "fixtures"

QUERY = "Gender affirming surgeries for female-to-male transgender individuals"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        config = AppConfig(
            graph_path=str(GOLDEN / "graph.jsonl"),
            corpus_path=str(GOLDEN / "corpus.jsonl"),
            max_mask_terms=6,
            data_dir=tmp,
        )
        graph = load_graph(config.graph_path)
        store = FeedbackStore(config.feedback_log, config.sessions_log)
        engine = SearchEngine(
            graph, store, config,
            mask_provider=StaticMaskProvider.from_file(GOLDEN / "mask_terms.json"),
        )
        client = TestClient(create_app(engine, store, config))

        search = client.post("/api/search", json={"query": QUERY, "k": 5, "n_min": 5})
        search.raise_for_status()
        body = search.json()
        # stable ids for replay: the recorded session id is part of the fixture
        (OUT / "search_response.json").write_text(json.dumps(body, indent=2) + "\n")

        (OUT / "metrics_empty.json").write_text(
            json.dumps(client.get("/api/metrics").json(), indent=2) + "\n")

        feedback_bodies = []
        for i, result in enumerate(body["results"]):
            payload = {
                "query_id": body["query_id"],
                "article_id": result["external_id"],
                "relevant": i != 3,
                "categories": {"Patient/Population/Problem": True, "Outcome": i % 2 == 0},
                "missing_concepts": "" if i != 3 else "comparison arm missing",
            }
            feedback_bodies.append(payload)
            response = client.post("/api/feedback", json=payload)
            assert response.status_code == 204, response.text
        (OUT / "feedback_submissions.json").write_text(
            json.dumps(feedback_bodies, indent=2) + "\n")

        (OUT / "metrics_after.json").write_text(
            json.dumps(client.get("/api/metrics").json(), indent=2) + "\n")

        session = client.get(f"/api/session/{body['query_id']}")
        session.raise_for_status()
        (OUT / "session.json").write_text(json.dumps(session.json(), indent=2) + "\n")

        health = client.get("/api/health").json()
        health["graph_version"] = "0" * 16  # pinned for fixture stability
        (OUT / "health.json").write_text(json.dumps(health, indent=2) + "\n")

    print(f"recorded fixtures in {OUT}")


if __name__ == "__main__":
    main()
