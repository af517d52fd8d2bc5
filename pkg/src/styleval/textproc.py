"""Deterministic text processing shared by every metric in the package.

Tokenization, sentence segmentation, syllable counting, Porter stemming,
and n-gram extraction. All functions are pure and depend only on their
inputs plus the shipped abbreviation list, so results are identical
across platforms and runs.
"""

from __future__ import annotations

import re
import unicodedata
from collections import Counter
from dataclasses import dataclass
from importlib import resources

from .errors import InvalidN

_WORD = r"[^\W\d_]+(?:['’-][^\W\d_]+)*"
_NUMBER = r"\d+(?:[.,]\d+)*"
_TOKEN_RE = re.compile(f"(?P<word>{_WORD})|(?P<number>{_NUMBER})|(?P<other>\\S)")

_TERMINALS = {".", "!", "?"}
# punctuation that may trail a terminal inside the same sentence
_ABSORB = _TERMINALS | {'"', "'", "”", "’", ")", "]", "}", "…"}

_VOWELS = frozenset("aeiouy")


@dataclass(frozen=True)
class Token:
    surface: str
    kind: str  # word | number | punctuation | symbol
    lowercase: str


def _classify_other(ch: str) -> str:
    return "punctuation" if unicodedata.category(ch).startswith("P") else "symbol"


def tokenize(raw: str) -> list[Token]:
    """Split text into word, number, punctuation, and symbol tokens.

    Words keep internal apostrophes and hyphens; numbers keep internal
    commas and periods; every other non-space character becomes its own
    one-character token.
    """
    tokens: list[Token] = []
    for m in _TOKEN_RE.finditer(raw):
        surface = m.group()
        if m.lastgroup == "word":
            kind = "word"
        elif m.lastgroup == "number":
            kind = "number"
        else:
            kind = _classify_other(surface)
        tokens.append(Token(surface, kind, surface.lower()))
    return tokens


def _load_abbreviations() -> frozenset[tuple[str, ...]]:
    """Abbreviations as lowercase token-surface sequences (dots included)."""
    text = resources.files("styleval.data").joinpath("abbreviations.txt").read_text("utf-8")
    entries = set()
    for line in text.splitlines():
        line = line.strip().lower()
        if not line or line.startswith("#"):
            continue
        entries.add(tuple(t.surface for t in tokenize(line)))
    return frozenset(entries)


_ABBREVIATIONS: frozenset[tuple[str, ...]] | None = None


def abbreviation_sequences() -> frozenset[tuple[str, ...]]:
    global _ABBREVIATIONS
    if _ABBREVIATIONS is None:
        _ABBREVIATIONS = _load_abbreviations()
    return _ABBREVIATIONS


def _suppressed_periods(tokens: list[Token]) -> set[int]:
    """Indices of '.' tokens that sit inside a known abbreviation."""
    seqs = abbreviation_sequences()
    if not seqs:
        return set()
    by_first: dict[str, list[tuple[str, ...]]] = {}
    for seq in seqs:
        by_first.setdefault(seq[0], []).append(seq)
    suppressed: set[int] = set()
    lows = [t.lowercase for t in tokens]
    for i, low in enumerate(lows):
        for seq in by_first.get(low, ()):
            j = i + len(seq)
            if j <= len(lows) and tuple(lows[i:j]) == seq:
                for k in range(i, j):
                    if tokens[k].surface == ".":
                        suppressed.add(k)
    return suppressed


def split_sentences(tokens: list[Token]) -> list[tuple[int, int]]:
    """Half-open index spans partitioning the tokens into sentences.

    A sentence ends after '.', '!' or '?' (plus any immediately following
    closing punctuation) unless the period belongs to a shipped
    abbreviation. Text without terminal punctuation is one sentence.
    """
    if not tokens:
        return []
    suppressed = _suppressed_periods(tokens)
    spans: list[tuple[int, int]] = []
    start = 0
    i = 0
    n = len(tokens)
    while i < n:
        tok = tokens[i]
        if tok.surface in _TERMINALS and not (tok.surface == "." and i in suppressed):
            j = i + 1
            while j < n and tokens[j].kind in ("punctuation", "symbol") \
                    and tokens[j].surface in _ABSORB \
                    and not (tokens[j].surface == "." and j in suppressed):
                j += 1
            spans.append((start, j))
            start = j
            i = j
        else:
            i += 1
    if start < n:
        spans.append((start, n))
    return spans


def count_syllables(word: str) -> int:
    """Heuristic syllable count for a word token surface.

    Counts maximal vowel groups (a e i o u y), subtracting a silent
    trailing "e" except after consonant + "le" where the "e" carries the
    final syllable. Hyphen parts are counted separately and summed.
    """
    if not any(c.isalpha() for c in word):
        return 0
    total = 0
    for part in word.replace("'", "").replace("’", "").lower().split("-"):
        part = "".join(c for c in part if c.isalpha())
        if not part:
            continue
        groups = len(re.findall(r"[aeiouy]+", part))
        if (
            groups > 1
            and part.endswith("e")
            and not (
                len(part) >= 3
                and part.endswith("le")
                and part[-3] not in _VOWELS
            )
        ):
            groups -= 1
        total += max(groups, 1)
    return max(total, 1)


# --- Porter stemmer ----------------------------------------------------------
#
# The 1980 algorithm, steps 1a through 5b, operating on lowercase words.

def _is_consonant(word: str, i: int) -> bool:
    ch = word[i]
    if ch in "aeiou":
        return False
    if ch == "y":
        return i == 0 or not _is_consonant(word, i - 1)
    return True


def _measure(stem: str) -> int:
    """Number of VC sequences in the [C](VC)^m[V] form of the stem."""
    m = 0
    prev_vowel = False
    for i in range(len(stem)):
        if _is_consonant(stem, i):
            if prev_vowel:
                m += 1
            prev_vowel = False
        else:
            prev_vowel = True
    return m


def _has_vowel(stem: str) -> bool:
    return any(not _is_consonant(stem, i) for i in range(len(stem)))


def _ends_double_consonant(word: str) -> bool:
    return (
        len(word) >= 2
        and word[-1] == word[-2]
        and _is_consonant(word, len(word) - 1)
    )


def _ends_cvc(word: str) -> bool:
    if len(word) < 3:
        return False
    if not (
        _is_consonant(word, len(word) - 3)
        and not _is_consonant(word, len(word) - 2)
        and _is_consonant(word, len(word) - 1)
    ):
        return False
    return word[-1] not in "wxy"


def _replace(word: str, suffix: str, repl: str, min_measure: int) -> str | None:
    if not word.endswith(suffix):
        return None
    stem = word[: len(word) - len(suffix)]
    if _measure(stem) > min_measure:
        return stem + repl
    return word


_STEP2 = (
    ("ational", "ate"), ("tional", "tion"), ("enci", "ence"), ("anci", "ance"),
    ("izer", "ize"), ("abli", "able"), ("alli", "al"), ("entli", "ent"),
    ("eli", "e"), ("ousli", "ous"), ("ization", "ize"), ("ation", "ate"),
    ("ator", "ate"), ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
    ("ousness", "ous"), ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
)

_STEP3 = (
    ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
    ("ical", "ic"), ("ful", ""), ("ness", ""),
)

_STEP4 = (
    "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
    "ment", "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
)


def stem(word: str) -> str:
    """Porter stem of a lowercase word; words of length <= 2 pass through."""
    if len(word) <= 2:
        return word
    w = word

    # step 1a
    if w.endswith("sses"):
        w = w[:-2]
    elif w.endswith("ies"):
        w = w[:-2]
    elif w.endswith("ss"):
        pass
    elif w.endswith("s"):
        w = w[:-1]

    # step 1b
    if w.endswith("eed"):
        if _measure(w[:-3]) > 0:
            w = w[:-1]
    else:
        cleanup = False
        if w.endswith("ed") and _has_vowel(w[:-2]):
            w = w[:-2]
            cleanup = True
        elif w.endswith("ing") and _has_vowel(w[:-3]):
            w = w[:-3]
            cleanup = True
        if cleanup:
            if w.endswith(("at", "bl", "iz")):
                w = w + "e"
            elif _ends_double_consonant(w) and not w.endswith(("l", "s", "z")):
                w = w[:-1]
            elif _measure(w) == 1 and _ends_cvc(w):
                w = w + "e"

    # step 1c
    if w.endswith("y") and _has_vowel(w[:-1]):
        w = w[:-1] + "i"

    # step 2
    for suffix, repl in _STEP2:
        if w.endswith(suffix):
            w = _replace(w, suffix, repl, 0)
            break

    # step 3
    for suffix, repl in _STEP3:
        if w.endswith(suffix):
            w = _replace(w, suffix, repl, 0)
            break

    # step 4
    for suffix in _STEP4:
        if w.endswith(suffix):
            stem_part = w[: len(w) - len(suffix)]
            if suffix == "ion" and not stem_part.endswith(("s", "t")):
                continue
            if _measure(stem_part) > 1:
                w = stem_part
            break

    # step 5a
    if w.endswith("e"):
        m = _measure(w[:-1])
        if m > 1 or (m == 1 and not _ends_cvc(w[:-1])):
            w = w[:-1]

    # step 5b
    if _measure(w) > 1 and _ends_double_consonant(w) and w.endswith("l"):
        w = w[:-1]

    return w


def ngrams(tokens: list[str], n: int) -> Counter:
    """Multiset of contiguous n-grams as tuples."""
    if n < 1:
        raise InvalidN(f"n-gram order must be >= 1, got {n}")
    if len(tokens) < n:
        return Counter()
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


@dataclass(frozen=True)
class Document:
    """Text with cached tokens, sentence spans, and readability counts."""

    raw: str
    tokens: tuple[Token, ...]
    sentences: tuple[tuple[int, int], ...]
    word_count: int
    char_count: int

    @classmethod
    def analyze(cls, raw: str) -> "Document":
        tokens = tokenize(raw)
        sentences = split_sentences(tokens)
        words = [t for t in tokens if t.kind == "word"]
        chars = sum(sum(c.isalnum() for c in t.surface) for t in words)
        return cls(raw, tuple(tokens), tuple(sentences), len(words), chars)

    def words(self) -> list[Token]:
        return [t for t in self.tokens if t.kind == "word"]

    def word_surfaces(self) -> list[str]:
        return [t.lowercase for t in self.tokens if t.kind == "word"]

    def sentence_tokens(self, span: tuple[int, int]) -> list[Token]:
        return list(self.tokens[span[0] : span[1]])

    def syllable_count(self) -> int:
        return sum(count_syllables(t.surface) for t in self.words())
