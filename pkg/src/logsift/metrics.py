"""Sequence-similarity metrics used by the robustness lab.

All three are classic O(n*m) dynamic programs. The test suite checks them
against independent brute-force implementations, so keep these free of
shortcuts that change results (early exits that preserve values are fine).
"""

from __future__ import annotations

import string

from .errors import DataError


class EmptyReference(DataError):
    """word_error_rate() needs a reference with at least one word."""


def lcs_length(a, b) -> int:
    """Length of the longest common subsequence of two sequences."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        curr = [0]
        append = curr.append
        for j, y in enumerate(b, start=1):
            if x == y:
                append(prev[j - 1] + 1)
            else:
                p = prev[j]
                c = curr[j - 1]
                append(p if p >= c else c)
        prev = curr
    return prev[-1]


def avg_similarity(p1: str, p2: str) -> float:
    """2*M / (|p1| + |p2|) where M is the character-level LCS length.

    Identical strings give 1.0, disjoint ones 0.0. Two empty strings are
    defined as identical (1.0) so batch aggregation stays total.
    """
    if not p1 and not p2:
        return 1.0
    return 2.0 * lcs_length(p1, p2) / (len(p1) + len(p2))


def levenshtein(a, b) -> int:
    """Unit-cost edit distance (insert / delete / substitute)."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, start=1):
        curr = [i]
        append = curr.append
        for j, y in enumerate(b, start=1):
            cost = prev[j - 1] if x == y else prev[j - 1] + 1
            dele = prev[j] + 1
            ins = curr[j - 1] + 1
            best = cost if cost <= dele else dele
            append(best if best <= ins else ins)
        prev = curr
    return prev[-1]


def levenshtein_norm(s1: str, s2: str) -> float:
    """Edit distance divided by max(|s1|, |s2|); 0.0 when both are empty."""
    longest = max(len(s1), len(s2))
    if longest == 0:
        return 0.0
    return levenshtein(s1, s2) / longest


def normalize_words(text: str) -> list[str]:
    """WER tokenization: split, strip edge punctuation, lowercase, drop empties.

    Stripping punctuation is deliberate so pure delimiter substitutions
    (e.g. ``(x)`` -> ``[x]``) count as zero word errors.
    """
    words = []
    for token in text.split():
        token = token.strip(string.punctuation).lower()
        if token:
            words.append(token)
    return words


def word_error_rate(ref: str, hyp: str) -> float:
    """(S + D + I) / N_ref under a minimal word-level edit alignment.

    Returned as a fraction (0.25 means 25%). Raises EmptyReference when the
    reference has no words left after normalization.
    """
    ref_words = normalize_words(ref)
    if not ref_words:
        raise EmptyReference(f"reference has no words: {ref!r}")
    hyp_words = normalize_words(hyp)
    return levenshtein(ref_words, hyp_words) / len(ref_words)
