"""Textual similarity between methods and token-level edit distance.

Similarity is cosine over case-preserving term-frequency vectors. Two
deliberate properties: terms keep their original case (so `date` and
`Date` never match), and no corpus-level weighting enters the score, so
adding unrelated methods to a corpus cannot change the similarity of a
fixed pair. Edit distance works on whole lexical tokens and models the
edits a developer would make to adapt a recommended body.
"""

from __future__ import annotations

import math
import re

from .javalex import RESERVED, lex

TokenSequence = list[str]
TermVector = dict[str, int]

_SUBTERM = re.compile(r"[A-Z]+(?![a-z])|[A-Z][a-z]*|[a-z]+|[0-9]+")


def tokenize(source_text: str) -> TokenSequence:
    """Lexical tokens of a method, comments and whitespace stripped.

    String and char literals stay single tokens. Total and deterministic.
    """
    return [t.text for t in lex(source_text)]


def split_subterms(identifier: str) -> list[str]:
    """Split an identifier at camelCase, underscore and digit boundaries.

    Case is preserved: `getDate` -> [get, Date],
    `isExternalStorageReadable` -> [is, External, Storage, Readable].
    """
    return _SUBTERM.findall(identifier)


def term_vector(seq: TokenSequence) -> TermVector:
    """Raw term frequencies for a token sequence.

    Identifiers contribute their case-preserved sub-terms, keywords and
    literal values contribute themselves, operators and separators drop out.
    """
    vector: TermVector = {}

    def add(term: str) -> None:
        vector[term] = vector.get(term, 0) + 1

    for token in seq:
        if not token:
            continue
        first = token[0]
        if first == '"' or first == "'":
            add(token)
        elif first.isdigit():
            add(token)
        elif first.isalpha() or first == "_" or first == "$":
            if token in RESERVED:
                add(token)
            else:
                for sub in split_subterms(token):
                    add(sub)
        # anything else is an operator or separator
    return vector


def similarity(a: TermVector, b: TermVector) -> float:
    """Cosine similarity of two tf vectors, in [0, 1].

    1.0 for identical non-empty vectors, 0.0 for disjoint term sets, and
    0.0 (degenerate input) when either vector is empty.
    """
    if not a or not b:
        return 0.0
    if a == b:
        return 1.0
    if len(b) < len(a):
        a, b = b, a
    dot = 0
    for term, count in a.items():
        other = b.get(term)
        if other:
            dot += count * other
    if dot == 0:
        return 0.0
    norm_a = math.sqrt(sum(c * c for c in a.values()))
    norm_b = math.sqrt(sum(c * c for c in b.values()))
    return min(dot / (norm_a * norm_b), 1.0)


def method_vector(source_text: str) -> TermVector:
    return term_vector(tokenize(source_text))


def token_distance(actual: TokenSequence, recommended: TokenSequence) -> tuple[int, int]:
    """Edit distance in whole tokens from a recommended body to the actual one.

    Unit-cost substitution/insertion/deletion. Returns (count, pct) where
    pct is 100 * count / len(actual) rounded to the nearest integer, the
    adaptation effort relative to what the developer really wrote.
    """
    if not actual:
        raise ValueError("actual token sequence is empty; distance undefined")
    count = _levenshtein(actual, recommended)
    pct = int(100 * count / len(actual) + 0.5)
    return count, pct


def _levenshtein(a: list[str], b: list[str]) -> int:
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(b) < len(a):
        a, b = b, a
    previous = list(range(len(a) + 1))
    current = [0] * (len(a) + 1)
    for j in range(1, len(b) + 1):
        current[0] = j
        bj = b[j - 1]
        for i in range(1, len(a) + 1):
            cost = 0 if a[i - 1] == bj else 1
            current[i] = min(
                previous[i] + 1,
                current[i - 1] + 1,
                previous[i - 1] + cost,
            )
        previous, current = current, previous
    return previous[len(a)]
