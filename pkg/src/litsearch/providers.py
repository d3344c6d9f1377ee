"""HTTP clients for optional external model services.

Every provider has a deterministic local fallback so the pipeline runs
(and tests pass) with no services configured:

  NER            -> dictionary matcher in entities.py
  masked fill    -> concept synonyms from the graph
  embeddings     -> hashed bag of words

External calls use a short timeout; on any failure the fallback takes
over, or ProviderUnavailable is raised when there is none.
"""

from __future__ import annotations

import logging

import numpy as np
import requests

from .embedding import HashedEmbedder
from .errors import DimensionMismatch, ProviderUnavailable
from .kg import ConceptGraph
from .textutils import normalize_label

logger = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 2.0


class HttpNerProvider:
    """POST {base}/ner {"text": ...} -> {"entities": [{surface,start,end}]}"""

    def __init__(self, base_url: str, timeout: float = DEFAULT_TIMEOUT, session=None):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.session = session or requests.Session()

    def extract(self, text: str) -> list[tuple[str, int, int]]:
        try:
            response = self.session.post(
                f"{self.base_url}/ner", json={"text": text}, timeout=self.timeout
            )
            response.raise_for_status()
            payload = response.json()
        except (requests.RequestException, ValueError) as exc:
            raise ProviderUnavailable(f"ner provider: {exc}") from exc
        return [
            (item["surface"], int(item["start"]), int(item["end"]))
            for item in payload.get("entities", [])
        ]


class GraphSynonymFiller:
    """Fallback masked-term provider: the concept's synonyms, declared order."""

    def __init__(self, graph: ConceptGraph):
        self.graph = graph

    def fill(self, text: str, mask_span: tuple[int, int], original_term: str,
             top_k: int) -> list[str]:
        concept = self.graph.lookup(original_term)
        if concept is None:
            raise ProviderUnavailable(f"no concept match for {original_term!r}")
        return list(concept.synonyms[:top_k])


class StaticMaskProvider:
    """Masked-term provider backed by a recorded substitute table.

    Pins model-generated substitutes to a file so a search strategy can
    be replayed exactly without the model. Keys are normalized terms,
    values ranked substitute lists. Terms missing from the table go to
    the fallback provider when one is configured.
    """

    def __init__(self, mapping: dict[str, list[str]], fallback=None):
        self.mapping = {normalize_label(term): list(subs) for term, subs in mapping.items()}
        self.fallback = fallback

    @classmethod
    def from_file(cls, path, fallback=None) -> "StaticMaskProvider":
        import json

        with open(path, encoding="utf-8") as handle:
            return cls(json.load(handle), fallback=fallback)

    def fill(self, text: str, mask_span: tuple[int, int], original_term: str,
             top_k: int) -> list[str]:
        terms = self.mapping.get(normalize_label(original_term))
        if terms is not None:
            return terms[:top_k]
        if self.fallback is not None:
            return self.fallback.fill(text, mask_span, original_term, top_k)
        raise ProviderUnavailable(f"no recorded substitutes for {original_term!r}")


class HttpMaskedTermProvider:
    """POST {base}/fill {"text","mask_span","top_k"} -> {"terms": [...]}"""

    def __init__(self, base_url: str, timeout: float = DEFAULT_TIMEOUT,
                 fallback=None, session=None):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.fallback = fallback
        self.session = session or requests.Session()

    def fill(self, text: str, mask_span: tuple[int, int], original_term: str,
             top_k: int) -> list[str]:
        if mask_span == (0, 0) or text[mask_span[0]:mask_span[1]].lower() != original_term.lower():
            # The service infers the masked term from the span, so make
            # sure the span really covers it.
            text = f"{text} {original_term}".strip()
            mask_span = (len(text) - len(original_term), len(text))
        try:
            response = self.session.post(
                f"{self.base_url}/fill",
                json={"text": text, "mask_span": list(mask_span), "top_k": top_k},
                timeout=self.timeout,
            )
            response.raise_for_status()
            return [str(term) for term in response.json().get("terms", [])]
        except (requests.RequestException, ValueError) as exc:
            if self.fallback is not None:
                logger.warning("masked-term provider unavailable (%s); using fallback", exc)
                return self.fallback.fill(text, mask_span, original_term, top_k)
            raise ProviderUnavailable(f"masked-term provider: {exc}") from exc


class HttpEmbeddingProvider:
    """POST {base}/embed {"texts": [...]} -> {"vectors": [[...]]}

    The vector dimension is discovered on the first successful call and
    pinned for the session; a later change raises DimensionMismatch.
    """

    def __init__(self, base_url: str, timeout: float = DEFAULT_TIMEOUT,
                 fallback: HashedEmbedder | None = None, session=None):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.fallback = fallback
        self.session = session or requests.Session()
        self.dimension: int | None = None

    def embed(self, text: str) -> np.ndarray:
        return self.embed_batch([text])[0]

    def embed_batch(self, texts: list[str]) -> list[np.ndarray]:
        try:
            response = self.session.post(
                f"{self.base_url}/embed", json={"texts": list(texts)}, timeout=self.timeout
            )
            response.raise_for_status()
            vectors = [np.asarray(vec, dtype=float) for vec in response.json()["vectors"]]
        except (requests.RequestException, ValueError, KeyError) as exc:
            if self.fallback is not None:
                logger.warning("embedding provider unavailable (%s); using fallback", exc)
                return [self.fallback.embed(text) for text in texts]
            raise ProviderUnavailable(f"embedding provider: {exc}") from exc
        for vec in vectors:
            if self.dimension is None:
                self.dimension = int(vec.shape[0])
            elif vec.shape[0] != self.dimension:
                raise DimensionMismatch(
                    f"provider returned dimension {vec.shape[0]}, pinned {self.dimension}"
                )
        return vectors


def provider_status(ner, filler, embedder) -> dict[str, str]:
    """Health-endpoint view: which providers are external vs fallback."""
    return {
        "ner": "external" if isinstance(ner, HttpNerProvider) else "fallback",
        "mlm": "external" if isinstance(filler, HttpMaskedTermProvider) else "fallback",
        "embedding": "external" if isinstance(embedder, HttpEmbeddingProvider) else "fallback",
    }
