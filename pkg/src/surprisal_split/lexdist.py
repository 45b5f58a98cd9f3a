"""Character-level Levenshtein edit distance for the word noise model."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class EditDistance:
    """Raw edit-operation count plus its length-normalized value.

    ``normalized`` is ``raw / max(len(a), len(b))``, in [0, 1]; it is 0.0
    when both words are empty.
    """

    raw: int
    normalized: float


def levenshtein(a: str, b: str) -> EditDistance:
    """Minimal insert/delete/substitute count between two words.

    Both words are case-folded before comparison. Unit costs; no
    transpositions.
    """
    a = a.casefold()
    b = b.casefold()
    if a == b:
        return EditDistance(0, 0.0)
    # Single-row DP over the shorter word.
    if len(b) > len(a):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost))
        prev = cur
    raw = prev[-1]
    return EditDistance(raw, raw / len(a))
