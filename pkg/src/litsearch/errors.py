"""Exception types raised across the package."""

from __future__ import annotations

from typing import Any


class LitSearchError(Exception):
    """Base class; carries a machine-readable payload for the CLI/service."""

    def payload(self) -> dict[str, Any]:
        return {"error": type(self).__name__, "message": str(self)}


class MalformedLine(LitSearchError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason

    def payload(self) -> dict[str, Any]:
        return {"error": "MalformedLine", "line": self.line_no, "message": self.reason}


class DuplicateId(LitSearchError):
    def __init__(self, concept_id: str):
        super().__init__(f"duplicate concept id {concept_id!r}")
        self.concept_id = concept_id

    def payload(self) -> dict[str, Any]:
        return {"error": "DuplicateId", "id": self.concept_id}


class DanglingEdge(LitSearchError):
    def __init__(self, source: str, target: str):
        super().__init__(f"edge {source!r} -> {target!r} points at a missing concept")
        self.source = source
        self.target = target

    def payload(self) -> dict[str, Any]:
        return {"error": "DanglingEdge", "source": self.source, "target": self.target}


class UnknownConcept(LitSearchError):
    def __init__(self, concept_id: str):
        super().__init__(f"unknown concept id {concept_id!r}")
        self.concept_id = concept_id


class ProviderUnavailable(LitSearchError):
    """An external provider failed and no fallback is configured."""


class EmptyExpansion(LitSearchError):
    """Query construction was asked to build from zero entities."""


class ParseError(LitSearchError):
    def __init__(self, position: int, expected: str):
        super().__init__(f"at position {position}: expected {expected}")
        self.position = position
        self.expected = expected

    def payload(self) -> dict[str, Any]:
        return {"error": "ParseError", "position": self.position, "expected": self.expected}


class DimensionMismatch(LitSearchError):
    """Vectors of different dimensions were combined."""


class BackendError(LitSearchError):
    """A retrieval backend request failed.

    When raised from inside the refinement loop, ``trace`` holds the
    iterations completed before the failure.
    """

    def __init__(self, status: int | None, detail: str, trace=None):
        super().__init__(f"backend error ({status}): {detail}")
        self.status = status
        self.detail = detail
        self.trace = trace

    def payload(self) -> dict[str, Any]:
        return {"error": "BackendError", "status": self.status, "message": self.detail}


class RateLimited(BackendError):
    def __init__(self, detail: str = "rate limited after retries", trace=None):
        super().__init__(429, detail, trace)


class UnknownSession(LitSearchError):
    def __init__(self, query_id: str):
        super().__init__(f"unknown query session {query_id!r}")
        self.query_id = query_id


class StorageError(LitSearchError):
    """The feedback or session log could not be written."""


class PipelineError(LitSearchError):
    """Wraps a module error with the pipeline stage that raised it."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r}: {cause}")
        self.stage = stage
        self.cause = cause

    def payload(self) -> dict[str, Any]:
        inner = self.cause.payload() if isinstance(self.cause, LitSearchError) else {
            "error": type(self.cause).__name__, "message": str(self.cause)}
        return {"error": "PipelineError", "stage": self.stage, "cause": inner}
