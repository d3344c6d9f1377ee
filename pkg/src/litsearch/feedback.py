"""Librarian feedback log and the relevance percentage metric.

Feedback and query sessions are append-only JSONL files with an
in-memory latest-wins index rebuilt at startup. Appends are serialized
by a lock; readers see fully written records only. A truncated final
line (crash mid-write) is quarantined to a sidecar file at startup and
the log is clipped back to the last intact record.
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .errors import StorageError, UnknownSession

logger = logging.getLogger(__name__)

FEEDBACK_CATEGORIES: tuple[str, ...] = (
    "Patient/Population/Problem",
    "Intervention/Exposure",
    "Comparison",
    "Outcome",
    "Study Design/Research Type",
    "Setting/Location",
    "Phenomenon of Interest",
    "Evaluation",
    "Captured All Relevant Concepts",
    "Other",
)


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def normalize_categories(raw: dict[str, bool] | None) -> dict[str, bool]:
    """Full category map in canonical order; unknown keys are rejected."""
    raw = raw or {}
    unknown = set(raw) - set(FEEDBACK_CATEGORIES)
    if unknown:
        raise ValueError(f"unknown feedback categories: {sorted(unknown)}")
    return {key: bool(raw.get(key, False)) for key in FEEDBACK_CATEGORIES}


@dataclass(frozen=True)
class FeedbackRecord:
    query_id: str
    article_id: str
    relevant: bool
    categories: dict[str, bool] = field(default_factory=dict)
    missing_concepts: str = ""
    ts: str = field(default_factory=_utc_now)

    def __post_init__(self):
        if not self.query_id or not self.article_id:
            raise ValueError("query_id and article_id must be non-empty")
        object.__setattr__(self, "categories", normalize_categories(self.categories))

    def to_json(self) -> dict:
        return {
            "query_id": self.query_id,
            "article_id": self.article_id,
            "relevant": self.relevant,
            "categories": self.categories,
            "missing_concepts": self.missing_concepts,
            "ts": self.ts,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "FeedbackRecord":
        return cls(
            query_id=obj["query_id"],
            article_id=obj["article_id"],
            relevant=bool(obj["relevant"]),
            categories=obj.get("categories") or {},
            missing_concepts=obj.get("missing_concepts", ""),
            ts=obj.get("ts") or _utc_now(),
        )


@dataclass(frozen=True)
class QuerySession:
    query_id: str
    query_text: str
    rendered_query: str
    ranked: tuple[tuple[str, float], ...]  # (article id, score) pairs, rank order
    sentinels: tuple[dict, ...] = ()
    created: str = field(default_factory=_utc_now)

    def __post_init__(self):
        ids = [article_id for article_id, _ in self.ranked]
        if len(ids) != len(set(ids)):
            raise ValueError("ranked article ids must be distinct")

    def to_json(self) -> dict:
        return {
            "query_id": self.query_id,
            "query_text": self.query_text,
            "rendered_query": self.rendered_query,
            "ranked": [{"id": i, "score": s} for i, s in self.ranked],
            "sentinels": list(self.sentinels),
            "created": self.created,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "QuerySession":
        return cls(
            query_id=obj["query_id"],
            query_text=obj.get("query_text", ""),
            rendered_query=obj.get("rendered_query", ""),
            ranked=tuple((r["id"], float(r["score"])) for r in obj.get("ranked", [])),
            sentinels=tuple(obj.get("sentinels", [])),
            created=obj.get("created") or _utc_now(),
        )


@dataclass
class RelevanceReport:
    """Relevance% over judged articles: per-query ratios and their
    unweighted mean. ``empty`` flags that nothing has been judged."""

    overall: float
    per_query: dict[str, float]
    judged: dict[str, int]
    empty: bool

    def to_json(self) -> dict:
        return {
            "overall": round(self.overall, 2),
            "per_query": {k: round(v, 2) for k, v in self.per_query.items()},
            "judged": self.judged,
            "empty": self.empty,
        }


def _recover_jsonl(path: Path) -> list[dict]:
    """Parse a JSONL file, quarantining a corrupt trailing line."""
    if not path.exists():
        return []
    data = path.read_bytes()
    records: list[dict] = []
    offset = 0
    good_end = 0
    for raw_line in data.split(b"\n"):
        line_end = offset + len(raw_line) + 1
        stripped = raw_line.strip()
        if stripped:
            try:
                records.append(json.loads(stripped.decode("utf-8")))
                good_end = min(line_end, len(data))
            except (json.JSONDecodeError, UnicodeDecodeError):
                if line_end >= len(data):
                    quarantine = path.with_suffix(path.suffix + ".quarantine")
                    with open(quarantine, "ab") as sidecar:
                        sidecar.write(raw_line + b"\n")
                    with open(path, "r+b") as handle:
                        handle.truncate(good_end)
                    logger.warning(
                        "quarantined truncated final line of %s (%d bytes)", path, len(raw_line)
                    )
                else:
                    logger.warning("skipping corrupt line mid-file in %s", path)
        offset = line_end
    return records


class FeedbackStore:
    """Durable store for query sessions and per-article judgments."""

    def __init__(self, feedback_path: str | Path, sessions_path: str | Path):
        self.feedback_path = Path(feedback_path)
        self.sessions_path = Path(sessions_path)
        self._lock = threading.Lock()
        self._sessions: dict[str, QuerySession] = {}
        self._judgments: dict[tuple[str, str], FeedbackRecord] = {}
        for obj in _recover_jsonl(self.sessions_path):
            session = QuerySession.from_json(obj)
            self._sessions[session.query_id] = session
        for obj in _recover_jsonl(self.feedback_path):
            record = FeedbackRecord.from_json(obj)
            self._judgments[(record.query_id, record.article_id)] = record

    def _append(self, path: Path, obj: dict):
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "a", encoding="utf-8") as handle:
                handle.write(json.dumps(obj, ensure_ascii=False) + "\n")
                handle.flush()
        except OSError as exc:
            raise StorageError(f"cannot append to {path}: {exc}") from exc

    def register_session(self, session: QuerySession):
        with self._lock:
            self._append(self.sessions_path, session.to_json())
            self._sessions[session.query_id] = session

    def get_session(self, query_id: str) -> QuerySession:
        session = self._sessions.get(query_id)
        if session is None:
            raise UnknownSession(query_id)
        return session

    def sessions(self) -> list[QuerySession]:
        return list(self._sessions.values())

    def record_feedback(self, record: FeedbackRecord):
        """Append a judgment; resubmission for the same (query, article)
        supersedes on read."""
        if record.query_id not in self._sessions:
            raise UnknownSession(record.query_id)
        with self._lock:
            self._append(self.feedback_path, record.to_json())
            self._judgments[(record.query_id, record.article_id)] = record

    def judgments(self, query_id: str | None = None) -> list[FeedbackRecord]:
        records = self._judgments.values()
        if query_id is None:
            return list(records)
        return [r for r in records if r.query_id == query_id]

    def relevance_report(self, query_id: str | None = None) -> RelevanceReport:
        return compute_relevance(self.judgments(), query_id)

    def relevance_percentage(self, query_id: str | None = None) -> float:
        return self.relevance_report(query_id).overall


def compute_relevance(
    records: list[FeedbackRecord],
    query_id: str | None = None,
) -> RelevanceReport:
    """Relevance% from latest-wins judgments.

    Per query: relevant / judged * 100. Overall: unweighted mean of the
    per-query ratios; queries with no judged articles are excluded. No
    judgments at all yields 0.0 with the empty flag set.
    """
    latest: dict[tuple[str, str], FeedbackRecord] = {
        (r.query_id, r.article_id): r for r in records
    }
    judged: dict[str, int] = {}
    relevant: dict[str, int] = {}
    for record in latest.values():
        if query_id is not None and record.query_id != query_id:
            continue
        judged[record.query_id] = judged.get(record.query_id, 0) + 1
        if record.relevant:
            relevant[record.query_id] = relevant.get(record.query_id, 0) + 1
    per_query = {
        qid: 100.0 * relevant.get(qid, 0) / count for qid, count in judged.items() if count
    }
    if not per_query:
        return RelevanceReport(0.0, {}, judged, empty=True)
    overall = sum(per_query.values()) / len(per_query)
    return RelevanceReport(overall, per_query, judged, empty=False)
