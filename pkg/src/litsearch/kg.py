"""Controlled-vocabulary concept graph: load, lookup, traverse.

The interchange format is one JSON object per line:

    {"id": "D013537", "label": "Sutures", "synonyms": ["stitches"],
     "tag": "MESH", "edges": [{"to": "D004864", "rel": "related"}]}

Edges may be declared on either endpoint; the loader de-duplicates and
treats them as undirected. The graph is immutable after load and safe
for concurrent readers.
"""

from __future__ import annotations

import hashlib
import json
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import DanglingEdge, DuplicateId, MalformedLine, UnknownConcept
from .textutils import normalize_label


class FieldTag(Enum):
    """Controlled-vocabulary field tag a term carries when rendered."""

    MESH = "MESH"
    TIAB = "TIAB"


@dataclass(frozen=True)
class Concept:
    id: str
    preferred_label: str
    synonyms: tuple[str, ...] = ()
    field_tag_hint: FieldTag = FieldTag.TIAB

    def labels(self) -> tuple[str, ...]:
        return (self.preferred_label,) + self.synonyms


@dataclass
class ConceptGraph:
    """Immutable concept graph with an undirected adjacency view.

    ``label_index`` maps every normalized preferred label and synonym to
    a concept id. When the same normalized label belongs to several
    concepts, preferred labels win over synonyms and the
    earliest-loaded concept wins within each class.
    """

    concepts: dict[str, Concept]
    edges: frozenset[tuple[str, str, str]]
    label_index: dict[str, str] = field(default_factory=dict)
    _adjacency: dict[str, set[str]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.label_index:
            index: dict[str, str] = {}
            for concept in self.concepts.values():
                for synonym in concept.synonyms:
                    index.setdefault(normalize_label(synonym), concept.id)
            preferred: dict[str, str] = {}
            for concept in self.concepts.values():
                preferred.setdefault(normalize_label(concept.preferred_label), concept.id)
            index.update(preferred)
            self.label_index.update(index)
        if not self._adjacency:
            adj: dict[str, set[str]] = {cid: set() for cid in self.concepts}
            for source, target, _rel in self.edges:
                adj[source].add(target)
                adj[target].add(source)
            self._adjacency.update(adj)

    def lookup(self, label: str) -> Concept | None:
        """Concept whose preferred label or synonym normalizes to ``label``."""
        concept_id = self.label_index.get(normalize_label(label))
        return self.concepts.get(concept_id) if concept_id else None

    def neighbors(self, concept_id: str, max_hops: int) -> set[Concept]:
        """Breadth-first closure within ``max_hops``, excluding the start."""
        if concept_id not in self.concepts:
            raise UnknownConcept(concept_id)
        if max_hops < 1:
            raise ValueError("max_hops must be >= 1")
        seen = {concept_id}
        frontier = deque([(concept_id, 0)])
        found: set[str] = set()
        while frontier:
            current, depth = frontier.popleft()
            if depth == max_hops:
                continue
            for adjacent in self._adjacency.get(current, ()):
                if adjacent not in seen:
                    seen.add(adjacent)
                    found.add(adjacent)
                    frontier.append((adjacent, depth + 1))
        return {self.concepts[cid] for cid in found}

    @property
    def version(self) -> str:
        """Content hash of the canonical serialization (cached)."""
        cached = getattr(self, "_version", None)
        if cached is None:
            cached = hashlib.sha256(serialize_graph(self).encode("utf-8")).hexdigest()[:16]
            self._version = cached
        return cached


def _parse_concept(obj: dict, line_no: int) -> tuple[Concept, list[tuple[str, str, str]]]:
    if not isinstance(obj, dict):
        raise MalformedLine(line_no, "expected a JSON object")
    concept_id = obj.get("id")
    label = obj.get("label")
    if not concept_id or not isinstance(concept_id, str):
        raise MalformedLine(line_no, "missing or empty 'id'")
    if not label or not isinstance(label, str):
        raise MalformedLine(line_no, "missing or empty 'label'")
    tag_raw = obj.get("tag", "TIAB")
    try:
        tag = FieldTag(tag_raw)
    except ValueError:
        raise MalformedLine(line_no, f"unknown tag {tag_raw!r}") from None
    synonyms: list[str] = []
    seen: set[str] = set()
    for raw in obj.get("synonyms", []) or []:
        if not isinstance(raw, str) or not raw.strip():
            raise MalformedLine(line_no, "synonyms must be non-empty strings")
        # exact duplicates and restatements of the label are dropped, not fatal
        if raw in seen or normalize_label(raw) == normalize_label(label):
            continue
        seen.add(raw)
        synonyms.append(raw)
    edges = []
    for raw_edge in obj.get("edges", []) or []:
        target = raw_edge.get("to") if isinstance(raw_edge, dict) else None
        if not target:
            raise MalformedLine(line_no, "edge missing 'to'")
        edges.append((concept_id, target, raw_edge.get("rel", "related")))
    return Concept(concept_id, label, tuple(synonyms), tag), edges


def load_graph(path: str | Path) -> ConceptGraph:
    """Load and validate a JSONL concept graph file.

    Raises MalformedLine, DuplicateId, or DanglingEdge; a successfully
    loaded graph satisfies every ConceptGraph invariant. Loading is
    idempotent: the same file always yields a structurally equal graph.
    """
    concepts: dict[str, Concept] = {}
    raw_edges: list[tuple[str, str, str]] = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedLine(line_no, f"invalid JSON: {exc.msg}") from None
            concept, edges = _parse_concept(obj, line_no)
            if concept.id in concepts:
                raise DuplicateId(concept.id)
            concepts[concept.id] = concept
            raw_edges.extend(edges)
    edge_set: set[tuple[str, str, str]] = set()
    for source, target, rel in raw_edges:
        if target not in concepts:
            raise DanglingEdge(source, target)
        a, b = sorted((source, target))
        edge_set.add((a, b, rel))
    return ConceptGraph(concepts=concepts, edges=frozenset(edge_set))


def serialize_graph(graph: ConceptGraph) -> str:
    """Canonical JSONL text: concepts sorted by id, edges on the
    lexicographically smaller endpoint, synonym order preserved."""
    by_source: dict[str, list[dict]] = {}
    for a, b, rel in sorted(graph.edges):
        by_source.setdefault(a, []).append({"to": b, "rel": rel})
    lines = []
    for cid in sorted(graph.concepts):
        concept = graph.concepts[cid]
        record = {
            "id": concept.id,
            "label": concept.preferred_label,
            "synonyms": list(concept.synonyms),
            "tag": concept.field_tag_hint.value,
            "edges": by_source.get(cid, []),
        }
        lines.append(json.dumps(record, sort_keys=True))
    return "\n".join(lines) + "\n"
