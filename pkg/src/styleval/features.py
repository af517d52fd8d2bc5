"""Rule-based linguistic feature tagging for register analysis.

The shipped catalog holds 32 features spanning the major Biber groups
(pronouns, modals, lexical classes, suffix proxies, punctuation, and two
document statistics). Every rule is deterministic over a token sequence,
so feature vectors are reproducible without a statistical tagger.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .errors import EmptyDocument
from .textproc import Document, Token


def _normalize(word: str) -> str:
    return word.replace("’", "'")


@dataclass(frozen=True)
class FeatureRule:
    name: str
    kind: str  # lexicon | suffix | bigram | punctuation | token-class | statistic
    payload: dict

    def _slot_matches(self, slot: dict, token: Token) -> bool:
        if token.kind != "word":
            return False
        word = _normalize(token.lowercase)
        if slot["kind"] == "lexicon":
            return word in slot["_wordset"]
        if slot["kind"] == "suffix":
            if len(word) < slot.get("min_length", 0):
                return False
            return word.endswith(tuple(slot["suffixes"]))
        return True  # "any" slot: any word token

    def count_matches(self, doc: Document) -> float:
        """Raw match count (or statistic value) before normalization."""
        kind = self.kind
        if kind == "lexicon":
            wordset = self.payload["_wordset"]
            return sum(
                1 for t in doc.tokens
                if t.kind == "word" and _normalize(t.lowercase) in wordset
            )
        if kind == "suffix":
            suffixes = tuple(self.payload["suffixes"])
            min_len = self.payload.get("min_length", 0)
            return sum(
                1 for t in doc.tokens
                if t.kind == "word"
                and len(t.lowercase) >= min_len
                and _normalize(t.lowercase).endswith(suffixes)
            )
        if kind == "bigram":
            first = self.payload["first"]
            second = self.payload["second"]
            count = 0
            for a, b in zip(doc.tokens, doc.tokens[1:]):
                if self._slot_matches(first, a) and self._slot_matches(second, b):
                    count += 1
            return count
        if kind == "punctuation":
            chars = set(self.payload["chars"])
            return sum(
                1 for t in doc.tokens
                if t.kind in ("punctuation", "symbol") and t.surface in chars
            )
        if kind == "token-class":
            cls = self.payload["class"]
            if cls == "number":
                return sum(1 for t in doc.tokens if t.kind == "number")
            if cls == "capitalized":
                return sum(
                    1 for t in doc.tokens
                    if t.kind == "word" and t.surface[:1].isupper()
                )
            if cls == "long_word":
                min_len = self.payload.get("min_length", 7)
                return sum(
                    1 for t in doc.tokens
                    if t.kind == "word"
                    and sum(c.isalpha() for c in t.surface) >= min_len
                )
            raise ValueError(f"unknown token class {cls!r}")
        if kind == "statistic":
            stat = self.payload["statistic"]
            words = doc.words()
            if stat == "type_token_ratio":
                window = self.payload.get("window", 400)
                head = [t.lowercase for t in words[:window]]
                return 1000.0 * len(set(head)) / len(head)
            if stat == "mean_word_length":
                return sum(
                    sum(c.isalnum() for c in t.surface) for t in words
                ) / len(words)
            raise ValueError(f"unknown statistic {stat!r}")
        raise ValueError(f"unknown matcher kind {kind!r}")

    def rate(self, doc: Document) -> float:
        """Per-1000-words rate (per-1000-tokens for punctuation rules);
        statistic rules return their value directly."""
        value = self.count_matches(doc)
        if self.kind == "statistic":
            return float(value)
        if self.kind == "punctuation":
            return 1000.0 * value / len(doc.tokens)
        return 1000.0 * value / doc.word_count


@dataclass(frozen=True)
class FeatureCatalog:
    version: str
    features: tuple[FeatureRule, ...]

    def names(self) -> list[str]:
        return [f.name for f in self.features]

    def __len__(self) -> int:
        return len(self.features)


@dataclass(frozen=True)
class FeatureVector:
    catalog_version: str
    rates: tuple[float, ...]
    doc_words: int


def _prepare_payload(kind: str, payload: dict) -> dict:
    """Attach precomputed lookup sets; returns a new payload dict."""
    payload = dict(payload)
    if kind == "lexicon":
        payload["_wordset"] = frozenset(payload["words"])
    if kind == "bigram":
        for slot_name in ("first", "second"):
            slot = dict(payload[slot_name])
            if slot["kind"] == "lexicon":
                slot["_wordset"] = frozenset(slot["words"])
            payload[slot_name] = slot
    return payload


def load_catalog(path: str | None = None) -> FeatureCatalog:
    """Load the shipped catalog, or a user-supplied override file."""
    if path is None:
        text = resources.files("styleval.data").joinpath("mda_catalog.json").read_text("utf-8")
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    spec = json.loads(text)
    rules = []
    seen = set()
    for entry in spec["features"]:
        name = entry["name"]
        if name in seen:
            raise ValueError(f"duplicate feature name {name!r}")
        seen.add(name)
        rules.append(
            FeatureRule(name, entry["kind"], _prepare_payload(entry["kind"], entry["payload"]))
        )
    return FeatureCatalog(spec["version"], tuple(rules))


def extract_features(doc: Document, catalog: FeatureCatalog) -> FeatureVector:
    """Feature rates for one document. Requires at least one word token."""
    if doc.word_count == 0:
        raise EmptyDocument("feature extraction requires at least one word token")
    rates = tuple(rule.rate(doc) for rule in catalog.features)
    return FeatureVector(catalog.version, rates, doc.word_count)
