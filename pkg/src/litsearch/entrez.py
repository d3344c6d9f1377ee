"""Entrez-style E-utility client: esearch for ids, efetch for records.

The base URL is configurable so tests (and air-gapped deployments)
point at a stub. Client-side throttling defaults to 3 requests/second,
retries cover transient 5xx and timeouts with exponential backoff.
"""

from __future__ import annotations

import logging
import threading
import time
import xml.etree.ElementTree as ET
from typing import Callable, NamedTuple

import requests

from .corpus import Article
from .errors import BackendError, RateLimited

logger = logging.getLogger(__name__)

FETCH_CHUNK = 200  # ids per efetch request
MAX_RETRIES = 2


class TokenBucket:
    """Thread-safe token bucket; acquire() blocks until a slot frees up."""

    def __init__(self, rate: float, capacity: int | None = None,
                 clock: Callable[[], float] = time.monotonic,
                 sleeper: Callable[[float], None] = time.sleep):
        self.rate = rate
        self.capacity = capacity if capacity is not None else max(1, int(rate))
        self.tokens = float(self.capacity)
        self.updated = clock()
        self.clock = clock
        self.sleeper = sleeper
        self._lock = threading.Lock()

    def acquire(self):
        while True:
            with self._lock:
                now = self.clock()
                self.tokens = min(self.capacity, self.tokens + (now - self.updated) * self.rate)
                self.updated = now
                if self.tokens >= 1.0:
                    self.tokens -= 1.0
                    return
                wait = (1.0 - self.tokens) / self.rate
            self.sleeper(wait)


class FetchResult(NamedTuple):
    articles: list[Article]
    missing: list[str]


class EntrezClient:
    def __init__(
        self,
        base_url: str,
        api_key: str | None = None,
        rate_limit: float = 3.0,
        timeout: float = 10.0,
        backoff_base: float = 0.5,
        session: requests.Session | None = None,
        sleeper: Callable[[float], None] = time.sleep,
    ):
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key
        self.timeout = timeout
        self.backoff_base = backoff_base
        self.session = session or requests.Session()
        self.sleeper = sleeper
        self.bucket = TokenBucket(rate_limit, sleeper=sleeper)

    def _get(self, endpoint: str, params: dict) -> requests.Response:
        if self.api_key:
            params = {**params, "api_key": self.api_key}
        url = f"{self.base_url}/{endpoint}"
        last_error = "unreachable"
        rate_limited = False
        for attempt in range(MAX_RETRIES + 1):
            if attempt:
                self.sleeper(self.backoff_base * (2 ** (attempt - 1)))
            self.bucket.acquire()
            try:
                response = self.session.get(url, params=params, timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = f"request failed: {exc}"
                logger.warning("GET %s failed (attempt %d): %s", endpoint, attempt + 1, exc)
                continue
            if response.status_code == 429:
                rate_limited = True
                last_error = "429 from backend"
                continue
            if response.status_code >= 500:
                last_error = f"{response.status_code}: {response.text[:200]}"
                continue
            if response.status_code >= 400:
                raise BackendError(response.status_code, response.text[:200])
            return response
        if rate_limited:
            raise RateLimited()
        raise BackendError(None, last_error)

    def search_with_count(self, rendered_query: str, retmax: int) -> tuple[list[str], int]:
        """Matching ids (at most retmax, backend order) and the total count."""
        if retmax < 1:
            raise ValueError("retmax must be >= 1")
        response = self._get(
            "esearch.fcgi",
            {"db": "pubmed", "term": rendered_query, "retmax": retmax, "retmode": "json"},
        )
        try:
            result = response.json()["esearchresult"]
            ids = [str(i) for i in result.get("idlist", [])][:retmax]
            count = int(result.get("count", len(ids)))
        except (ValueError, KeyError) as exc:
            raise BackendError(response.status_code, f"bad esearch payload: {exc}") from None
        return ids, count

    def search(self, rendered_query: str, retmax: int) -> list[str]:
        return self.search_with_count(rendered_query, retmax)[0]

    def fetch(self, ids: list[str]) -> FetchResult:
        """Articles for the given ids, input order, misses reported."""
        if not ids:
            raise ValueError("ids must be non-empty")
        found: dict[str, Article] = {}
        for start in range(0, len(ids), FETCH_CHUNK):
            chunk = ids[start:start + FETCH_CHUNK]
            response = self._get(
                "efetch.fcgi",
                {"db": "pubmed", "id": ",".join(chunk), "rettype": "abstract", "retmode": "xml"},
            )
            for article in parse_efetch_xml(response.text):
                found[article.external_id] = article
        articles = [found[i] for i in ids if i in found]
        missing = [i for i in ids if i not in found]
        if missing:
            logger.warning("efetch resolved %d/%d ids; missing: %s",
                           len(articles), len(ids), ",".join(missing[:10]))
        return FetchResult(articles, missing)


def parse_efetch_xml(xml_text: str) -> list[Article]:
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        raise BackendError(None, f"unparseable efetch XML: {exc}") from None
    articles = []
    for node in root.findall(".//PubmedArticle"):
        pmid = node.findtext(".//PMID")
        title = node.findtext(".//ArticleTitle")
        if not pmid or not title:
            continue
        abstract = " ".join(
            "".join(part.itertext()).strip()
            for part in node.findall(".//AbstractText")
        ).strip()
        mesh = tuple(
            heading.findtext("DescriptorName") or ""
            for heading in node.findall(".//MeshHeading")
            if heading.findtext("DescriptorName")
        )
        articles.append(
            Article(
                external_id=pmid,
                title=title,
                abstract=abstract,
                mesh_terms=mesh,
                journal=node.findtext(".//Journal/Title"),
            )
        )
    return articles
