"""Readability formulas against hand-counted fixtures.

Each fixture records hand-derived word, sentence, syllable, and character
counts; the expected grade is computed from those counts with the
published formulas, independent of the implementation's own counters.
"""

import pytest

from styleval.errors import EmptyDocument
from styleval.readability import ari, fkgl
from styleval.textproc import Document

# (text, words, sentences, syllables, characters)
FIXTURES = [
    ("The cat sat on the mat.", 6, 1, 6, 17),
    ("The cat sat. The dog ran.", 6, 2, 6, 18),
    ("I see you. You see me. We see them.", 9, 3, 9, 24),
    ("Considerable deliberation preceded the declaration.", 5, 1, 18, 46),
    ("It is a truth universally acknowledged.", 6, 1, 13, 33),
    ("Dr. Lee spoke at 5 p.m. The talk was long.", 10, 1, 10, 28),
    ("Why did you run? I was late!", 7, 2, 7, 20),
    ("I can't believe it's already over.", 6, 1, 10, 26),
    ("The examination of the documentation demonstrated considerable improvement.",
     8, 1, 26, 67),
    ("Go now! We must not wait for them.", 8, 2, 8, 25),
]


@pytest.mark.parametrize("text,words,sentences,syllables,chars", FIXTURES)
def test_fkgl_matches_hand_counts(text, words, sentences, syllables, chars):
    expected = 0.39 * (words / sentences) + 11.8 * (syllables / words) - 15.59
    assert fkgl(Document.analyze(text)) == pytest.approx(expected, abs=0.005)


@pytest.mark.parametrize("text,words,sentences,syllables,chars", FIXTURES)
def test_ari_matches_hand_counts(text, words, sentences, syllables, chars):
    expected = 4.71 * (chars / words) + 0.5 * (words / sentences) - 21.43
    assert ari(Document.analyze(text)) == pytest.approx(expected, abs=0.005)


def test_counts_underlying_fixtures_are_current():
    # guards the fixture numbers against tokenizer drift
    for text, words, sentences, syllables, chars in FIXTURES:
        doc = Document.analyze(text)
        assert doc.word_count == words, text
        assert len(doc.sentences) == sentences, text
        assert doc.syllable_count() == syllables, text
        assert doc.char_count == chars, text


def test_empty_document_raises():
    for text in ("", "   ", "!!!", "123 456"):
        with pytest.raises(EmptyDocument):
            fkgl(Document.analyze(text))
        with pytest.raises(EmptyDocument):
            ari(Document.analyze(text))


def test_longer_sentences_raise_grade():
    short = Document.analyze("We ran. We hid. We won.")
    long = Document.analyze("We ran and then we hid before we finally won the game.")
    assert fkgl(long) > fkgl(short)
    assert ari(long) > ari(short)
