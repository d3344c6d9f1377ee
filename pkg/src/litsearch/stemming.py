"""Wildcard stem rules for query term variants.

The table is fixed and versioned: changing it changes every rendered
query, so the golden pairs in tests/data/stem_golden.json must be
updated deliberately alongside it. Suffix stripping alone does not
reproduce the production truncation behavior for every word (e.g.
"gender" stays whole while "transgender" truncates), so words listed
in NO_STRIP keep their full form as the stem.
"""

from __future__ import annotations

STEM_TABLE_VERSION = 1

# (suffix, replacement); longest applicable suffix wins.
SUFFIX_RULES: list[tuple[str, str]] = [
    ("ies", "i"),
    ("als", ""),
    ("es", ""),
    ("er", ""),
    ("s", ""),
    ("e", ""),
]

# Words whose stem is the whole lowercased word.
NO_STRIP: frozenset[str] = frozenset({"gender"})

MIN_STEM_LENGTH = 4

_ORDERED_RULES = sorted(SUFFIX_RULES, key=lambda r: len(r[0]), reverse=True)


def stem(token: str) -> str | None:
    """Stem for the wildcard variant of a single token, or None.

    None means the token is not covered by the rule table (no suffix
    applies, or every applicable rule leaves a stem shorter than
    MIN_STEM_LENGTH) and no wildcard variant should be emitted.
    """
    word = token.lower()
    if word in NO_STRIP:
        return word
    for suffix, replacement in _ORDERED_RULES:
        if word.endswith(suffix) and len(word) > len(suffix):
            candidate = word[: -len(suffix)] + replacement
            if len(candidate) >= MIN_STEM_LENGTH:
                return candidate
    return None
