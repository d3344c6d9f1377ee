"""Shared tokenization and label normalization.

One tokenizer serves dictionary matching, boolean evaluation, and the
fallback embedder so that a phrase matched at extraction time is also
matchable at retrieval time. Hyphens and all other punctuation split
tokens: "female-to-male" -> ["female", "to", "male"].
"""

from __future__ import annotations

import re

_TOKEN_RE = re.compile(r"[A-Za-z0-9]+")


def tokenize(text: str) -> list[str]:
    """Lowercased alphanumeric tokens in text order."""
    return [m.group(0).lower() for m in _TOKEN_RE.finditer(text)]


def tokenize_spans(text: str) -> list[tuple[str, int, int]]:
    """Lowercased tokens with their (start, end) character spans."""
    return [(m.group(0).lower(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]


def normalize_label(label: str) -> str:
    """Canonical form used for every label/surface comparison.

    Lowercase, punctuation treated as whitespace, runs collapsed to a
    single space. "  Female-to-Male " and "female to male" normalize
    identically, which keeps lookup deterministic without any
    linguistic machinery.
    """
    return " ".join(tokenize(label))
