"""Word and sentence normalization shared by the scoring pipeline."""

from __future__ import annotations

import string

# Edge punctuation only: word-internal apostrophes/hyphens are kept.
_EDGE_PUNCT = string.punctuation + "‘’“”…"


def tokenize(sentence: str) -> list[str]:
    """Whitespace tokenization; punctuation stays attached to words."""
    return sentence.split()


def normalize_word(word: str) -> str:
    """Strip whitespace and edge punctuation, then case-fold.

    This is the form words take inside the noise model: casing and
    terminal punctuation are orthographic, not production errors.
    """
    return word.strip().strip(_EDGE_PUNCT).casefold()
