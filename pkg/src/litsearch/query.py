"""Boolean query AST and the field-tagged search dialect.

A query is always an AND of per-entity OR groups. Rendering is
bit-exact deterministic:

    ("Gender"[tiab] OR Gender[tiab] OR gender*[tiab]) AND (...)

parse_query inverts render so stored query strings can be audited and
replayed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from .errors import EmptyExpansion, ParseError
from .kg import FieldTag
from .stemming import stem

if TYPE_CHECKING:
    from .expansion import ExpansionSet

_TAG_RENDER = {FieldTag.TIAB: "tiab", FieldTag.MESH: "Mesh"}
_TAG_PARSE = {"tiab": FieldTag.TIAB, "Mesh": FieldTag.MESH}
_WORD_STOP = set(' ()[]"*')


@dataclass(frozen=True)
class TaggedTerm:
    text: str
    tag: FieldTag = FieldTag.TIAB
    quoted: bool = False
    wildcard: bool = False

    def __post_init__(self):
        if not self.text:
            raise ValueError("term text must be non-empty")
        if self.wildcard and self.quoted:
            raise ValueError("wildcard terms cannot be quoted")
        if any(ch in self.text for ch in '()[]"*'):
            raise ValueError(f"term text contains reserved characters: {self.text!r}")
        if any(ch.isspace() for ch in self.text):
            if self.wildcard:
                raise ValueError("wildcard terms must be a single token")
            if not self.quoted:
                raise ValueError("multiword terms must be quoted")

    def render(self) -> str:
        tag = _TAG_RENDER[self.tag]
        if self.quoted:
            return f'"{self.text}"[{tag}]'
        if self.wildcard:
            return f"{self.text}*[{tag}]"
        return f"{self.text}[{tag}]"


@dataclass(frozen=True)
class BooleanQuery:
    """AND over OR groups; group order is the surviving-entity order."""

    groups: tuple[tuple[TaggedTerm, ...], ...]

    def __post_init__(self):
        if not self.groups:
            raise ValueError("a query needs at least one group")
        if any(not group for group in self.groups):
            raise ValueError("every OR group needs at least one term")


def term_variants(surface: str) -> list[TaggedTerm]:
    """Quoted, exact, and wildcard-stem variants of an entity surface.

    Multiword surfaces only get the quoted phrase form. Single tokens
    add the unquoted exact form plus a wildcard on the stem when the
    stem table covers the token.
    """
    surface = " ".join(surface.split())
    if not surface:
        raise ValueError("surface must be non-empty")
    variants = [TaggedTerm(surface, quoted=True)]
    if " " not in surface:
        variants.append(TaggedTerm(surface))
        stemmed = stem(surface)
        if stemmed is not None:
            variants.append(TaggedTerm(stemmed, wildcard=True))
    return variants


def expansion_term(label: str, tag: FieldTag = FieldTag.TIAB) -> TaggedTerm:
    """TaggedTerm for a vocabulary or substitute label.

    Multiword labels are quoted; a trailing ``*`` marks a wildcard stem.
    """
    label = " ".join(label.split())
    if label.endswith("*") and " " not in label:
        return TaggedTerm(label[:-1], tag, wildcard=True)
    return TaggedTerm(label, tag, quoted=" " in label)


def build_specific_query(exp: "ExpansionSet") -> BooleanQuery:
    """Strictest conjunctive query: one OR group per surviving entity.

    Each group holds the entity's term variants followed by its
    vocabulary terms and mask substitutes, duplicates dropped.
    """
    if not exp.entries:
        raise EmptyExpansion("no entities to build a query from")
    groups: list[tuple[TaggedTerm, ...]] = []
    for entry in exp.entries:
        terms: list[TaggedTerm] = list(term_variants(entry.entity.surface))
        for label, tag in entry.kg_terms:
            terms.append(expansion_term(label, tag))
        for label in entry.mask_terms:
            terms.append(expansion_term(label))
        deduped: list[TaggedTerm] = []
        seen: set[TaggedTerm] = set()
        for term in terms:
            if term not in seen:
                seen.add(term)
                deduped.append(term)
        groups.append(tuple(deduped))
    return BooleanQuery(tuple(groups))


def render(query: BooleanQuery) -> str:
    """Deterministic text form: groups joined by AND, terms by OR."""
    rendered_groups = (
        "(" + " OR ".join(term.render() for term in group) + ")" for group in query.groups
    )
    return " AND ".join(rendered_groups)


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def eof(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def skip_spaces(self):
        while self.pos < len(self.text) and self.text[self.pos] == " ":
            self.pos += 1

    def expect(self, literal: str, expected: str | None = None):
        if not self.text.startswith(literal, self.pos):
            raise ParseError(self.pos, expected or repr(literal))
        self.pos += len(literal)

    def take_until(self, stop_char: str, expected: str) -> str:
        end = self.text.find(stop_char, self.pos)
        if end == -1:
            raise ParseError(len(self.text), expected)
        value = self.text[self.pos:end]
        self.pos = end
        return value

    def take_word(self) -> str:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in _WORD_STOP:
            self.pos += 1
        if self.pos == start:
            raise ParseError(start, "a term")
        return self.text[start:self.pos]


def _parse_tag(scanner: _Scanner) -> FieldTag:
    scanner.expect("[", "'[' introducing a field tag")
    name = scanner.take_until("]", "']' closing the field tag")
    tag = _TAG_PARSE.get(name)
    if tag is None:
        raise ParseError(scanner.pos - len(name), "field tag 'tiab' or 'Mesh'")
    scanner.expect("]")
    return tag


def _parse_term(scanner: _Scanner) -> TaggedTerm:
    scanner.skip_spaces()
    if scanner.peek() == '"':
        scanner.expect('"')
        start = scanner.pos
        text = scanner.take_until('"', "closing '\"'")
        if not text:
            raise ParseError(start, "non-empty quoted term")
        scanner.expect('"')
        try:
            return TaggedTerm(text, _parse_tag(scanner), quoted=True)
        except ValueError:
            raise ParseError(start, "a term without reserved characters") from None
    start = scanner.pos
    word = scanner.take_word()
    wildcard = scanner.peek() == "*"
    if wildcard:
        scanner.expect("*")
    try:
        return TaggedTerm(word, _parse_tag(scanner), wildcard=wildcard)
    except ValueError:
        raise ParseError(start, "a term without reserved characters") from None


def _parse_group(scanner: _Scanner) -> tuple[TaggedTerm, ...]:
    scanner.skip_spaces()
    scanner.expect("(", "'(' opening a group")
    terms = [_parse_term(scanner)]
    while True:
        scanner.skip_spaces()
        if scanner.peek() == ")":
            scanner.expect(")")
            return tuple(terms)
        if scanner.eof():
            raise ParseError(scanner.pos, "'OR' or ')'")
        scanner.expect("OR ", "'OR' or ')'")
        terms.append(_parse_term(scanner))


def parse_query(rendered: str) -> BooleanQuery:
    """Parse a rendered query back into a structurally equal AST."""
    scanner = _Scanner(rendered)
    groups = [_parse_group(scanner)]
    while True:
        scanner.skip_spaces()
        if scanner.eof():
            break
        scanner.expect("AND ", "'AND' or end of query")
        groups.append(_parse_group(scanner))
    try:
        return BooleanQuery(tuple(groups))
    except ValueError as exc:  # pragma: no cover - groups are non-empty by construction
        raise ParseError(0, str(exc)) from None


def query_terms(query: BooleanQuery) -> list[str]:
    """Flat term strings (wildcards kept) for highlighting and audits."""
    out: list[str] = []
    seen: set[str] = set()
    for group in query.groups:
        for term in group:
            text = term.text + ("*" if term.wildcard else "")
            if text not in seen:
                seen.add(text)
                out.append(text)
    return out
