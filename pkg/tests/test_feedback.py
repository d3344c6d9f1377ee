from __future__ import annotations

import json
import random

import pytest

from litsearch.errors import UnknownSession
from litsearch.feedback import (
    FEEDBACK_CATEGORIES,
    FeedbackRecord,
    FeedbackStore,
    QuerySession,
    compute_relevance,
)


@pytest.fixture
def store(tmp_path) -> FeedbackStore:
    return FeedbackStore(tmp_path / "feedback.jsonl", tmp_path / "sessions.jsonl")


def session(query_id="q1", ranked=(("a1", 90.0), ("a2", 80.0))) -> QuerySession:
    return QuerySession(query_id=query_id, query_text="text",
                        rendered_query="(x[tiab])", ranked=tuple(ranked))


def record(query_id="q1", article_id="a1", relevant=True, **kwargs) -> FeedbackRecord:
    return FeedbackRecord(query_id=query_id, article_id=article_id,
                          relevant=relevant, **kwargs)


def test_record_appends_one_line(store):
    store.register_session(session())
    store.record_feedback(record())
    lines = store.feedback_path.read_text().splitlines()
    assert len(lines) == 1
    assert json.loads(lines[0])["article_id"] == "a1"


def test_resubmission_latest_wins_on_read(store):
    store.register_session(session())
    store.record_feedback(record(relevant=True))
    store.record_feedback(record(relevant=False, missing_concepts="population"))
    judged = store.judgments("q1")
    assert len(judged) == 1
    assert judged[0].relevant is False
    assert judged[0].missing_concepts == "population"
    # both writes remain in the log
    assert len(store.feedback_path.read_text().splitlines()) == 2


def test_unknown_session_rejected(store):
    with pytest.raises(UnknownSession):
        store.record_feedback(record(query_id="ghost"))


def test_latest_wins_survives_reload(store):
    store.register_session(session())
    store.record_feedback(record(relevant=False))
    store.record_feedback(record(relevant=True))
    reloaded = FeedbackStore(store.feedback_path, store.sessions_path)
    assert reloaded.judgments("q1")[0].relevant is True
    assert reloaded.get_session("q1").query_id == "q1"


def test_four_of_five_is_exactly_80(store):
    store.register_session(session(ranked=tuple((f"a{i}", 50.0) for i in range(5))))
    for i in range(5):
        store.record_feedback(record(article_id=f"a{i}", relevant=(i != 2)))
    report = store.relevance_report()
    assert report.overall == 80.0
    assert report.per_query["q1"] == 80.0
    assert not report.empty


def test_zero_judged_query_is_excluded(store):
    store.register_session(session("q1"))
    store.register_session(session("q2"))
    store.record_feedback(record(query_id="q1", relevant=True))
    report = store.relevance_report()
    assert report.per_query == {"q1": 100.0}
    assert report.overall == 100.0


def test_unweighted_mean_over_queries():
    records = []
    # q1: 4/5 relevant = 80%; q2: 2/5 relevant = 40%
    for i in range(5):
        records.append(record(query_id="q1", article_id=f"a{i}", relevant=i != 0))
        records.append(record(query_id="q2", article_id=f"b{i}", relevant=i < 2))
    report = compute_relevance(records)
    assert report.per_query["q1"] == pytest.approx(80.0)
    assert report.per_query["q2"] == pytest.approx(40.0)
    assert report.overall == pytest.approx(60.0)


def test_no_judgments_anywhere_sets_empty_flag(store):
    report = store.relevance_report()
    assert report.overall == 0.0
    assert report.empty is True


def test_ratio_bounds_and_monotonicity():
    rng = random.Random(23)
    records = []
    for i in range(30):
        records.append(record(query_id=f"q{i % 3}", article_id=f"a{i}",
                              relevant=rng.random() < 0.5))
        report = compute_relevance(records)
        assert 0.0 <= report.overall <= 100.0
    before = compute_relevance(records).per_query["q0"]
    records.append(record(query_id="q0", article_id="extra", relevant=True))
    after = compute_relevance(records).per_query["q0"]
    assert after >= before


def test_appends_never_rewrite_existing_bytes(store):
    store.register_session(session())
    store.record_feedback(record(article_id="a1"))
    before = store.feedback_path.read_bytes()
    store.record_feedback(record(article_id="a2"))
    after = store.feedback_path.read_bytes()
    assert after[: len(before)] == before


def test_truncated_final_line_is_quarantined(tmp_path):
    feedback = tmp_path / "feedback.jsonl"
    sessions = tmp_path / "sessions.jsonl"
    store = FeedbackStore(feedback, sessions)
    store.register_session(session())
    store.record_feedback(record(article_id="a1"))
    intact = feedback.read_bytes()
    with open(feedback, "ab") as handle:
        handle.write(b'{"query_id": "q1", "article_id": "a2", "rel')  # crash mid-write
    recovered = FeedbackStore(feedback, sessions)
    assert [r.article_id for r in recovered.judgments("q1")] == ["a1"]
    assert feedback.read_bytes() == intact
    quarantine = feedback.with_suffix(feedback.suffix + ".quarantine")
    assert quarantine.exists() and b'"a2"' in quarantine.read_bytes()
    # the clipped log accepts appends again
    recovered.record_feedback(record(article_id="a3"))
    assert {r.article_id for r in recovered.judgments("q1")} == {"a1", "a3"}


def test_category_keys_are_validated():
    with pytest.raises(ValueError):
        record(categories={"Not A Category": True})
    normalized = record(categories={"Outcome": True}).categories
    assert set(normalized) == set(FEEDBACK_CATEGORIES)
    assert normalized["Outcome"] is True
    assert normalized["Comparison"] is False


def test_session_requires_distinct_article_ids():
    with pytest.raises(ValueError):
        session(ranked=(("a1", 1.0), ("a1", 2.0)))


def test_concurrent_appends_stay_line_atomic(store):
    import threading

    store.register_session(session())
    def write(worker: int):
        for i in range(25):
            store.record_feedback(record(article_id=f"w{worker}-a{i}", relevant=True))

    threads = [threading.Thread(target=write, args=(w,)) for w in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    lines = store.feedback_path.read_text().splitlines()
    assert len(lines) == 100
    parsed = [json.loads(line) for line in lines]  # every line intact JSON
    assert len({p["article_id"] for p in parsed}) == 100
    assert len(store.judgments("q1")) == 100
