from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

import pytest

from litsearch.kg import load_graph

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
GOLDEN = FIXTURES / "golden"
TEST_DATA = Path(__file__).resolve().parent / "data"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def golden_dir() -> Path:
    return GOLDEN


@pytest.fixture
def mesh_mini():
    return load_graph(FIXTURES / "mesh-mini.jsonl")


class StubServer:
    """Scripted HTTP server for provider and backend tests.

    Register handlers per path; each handler receives (method, path,
    params, body_json) and returns (status, payload) where payload is a
    dict (JSON) or a (content_type, bytes) pair. Every request is
    recorded in ``self.requests``.
    """

    def __init__(self):
        self.requests: list[dict] = []
        self.handlers: dict[str, callable] = {}
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def _dispatch(self, method):
                parsed = urlparse(self.path)
                params = {k: v[0] for k, v in parse_qs(parsed.query).items()}
                length = int(self.headers.get("Content-Length") or 0)
                body = None
                if length:
                    try:
                        body = json.loads(self.rfile.read(length))
                    except json.JSONDecodeError:
                        body = None
                record = {"method": method, "path": parsed.path, "params": params, "body": body}
                stub.requests.append(record)
                handler = stub.handlers.get(parsed.path)
                if handler is None:
                    self.send_response(404)
                    self.end_headers()
                    return
                status, payload = handler(method, parsed.path, params, body)
                if isinstance(payload, tuple):
                    content_type, raw = payload
                else:
                    content_type, raw = "application/json", json.dumps(payload).encode()
                self.send_response(status)
                self.send_header("Content-Type", content_type)
                self.send_header("Content-Length", str(len(raw)))
                self.end_headers()
                self.wfile.write(raw)

            def do_GET(self):
                self._dispatch("GET")

            def do_POST(self):
                self._dispatch("POST")

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def url(self) -> str:
        host, port = self._server.server_address
        return f"http://{host}:{port}"

    def start(self):
        self._thread.start()
        return self

    def stop(self):
        self._server.shutdown()
        self._server.server_close()


@pytest.fixture
def stub_server():
    server = StubServer().start()
    yield server
    server.stop()
