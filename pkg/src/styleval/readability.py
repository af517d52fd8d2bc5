"""Readability grade metrics computed from Document counts."""

from __future__ import annotations

from .errors import EmptyDocument
from .textproc import Document


def _check(doc: Document) -> None:
    if doc.word_count == 0 or len(doc.sentences) == 0:
        raise EmptyDocument("readability needs at least one word and one sentence")


def fkgl(doc: Document) -> float:
    """Flesch-Kincaid grade level."""
    _check(doc)
    words = doc.word_count
    sentences = len(doc.sentences)
    syllables = doc.syllable_count()
    return 0.39 * (words / sentences) + 11.8 * (syllables / words) - 15.59


def ari(doc: Document) -> float:
    """Automated readability index."""
    _check(doc)
    words = doc.word_count
    sentences = len(doc.sentences)
    chars = doc.char_count
    return 4.71 * (chars / words) + 0.5 * (words / sentences) - 21.43
