"""Shared fixtures: deterministic synthetic corpora and common paths."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from styleval.rng import SplitMix64

TESTS_DIR = Path(__file__).parent
GOLDEN_DIR = TESTS_DIR / "golden"
FIXTURES_DIR = TESTS_DIR / "fixtures"

_CONFIG = None


def pytest_configure(config):
    global _CONFIG
    _CONFIG = config


def capture_manager():
    """The session's capture manager, or None outside a pytest run."""
    if _CONFIG is None:
        return None
    return _CONFIG.pluginmanager.getplugin("capturemanager")

# Oral, involved register: pronoun-heavy, contracted, interactive.
_INVOLVED_BITS = [
    "I think you'll really like it, don't you?",
    "Well, we didn't know what she wanted, so I just asked her.",
    "You know I can't believe they'd say that to me!",
    "Honestly, I feel like we should just go, right?",
    "She said it's fine but I don't buy it, do you?",
    "Maybe we could grab something quick, I'm starving.",
    "He told me he'd come over if you want him to.",
    "I guess you're right, it really does seem odd.",
]

# Literate, informational register: nominalizations, prepositions, long words.
_INFORMATIONAL_BITS = [
    "The implementation of the regulation requires extensive documentation of procedures.",
    "Consideration of the information in the administration's statement remains essential.",
    "The examination of the population was conducted under standardized conditions.",
    "Establishment of the organization depended upon the distribution of resources.",
    "The evaluation demonstrated substantial improvement in the measurement of outcomes.",
    "Development of the infrastructure proceeded in accordance with the authorization.",
    "The investigation of the transaction involved verification of the documentation.",
    "Interpretation of the observations requires familiarity with the classification.",
]


def synthetic_register_texts(n_per_register: int, seed: int = 99,
                             sentences_per_text: int = 6) -> tuple[list[str], list[str]]:
    """Two stylistically separated synthetic corpora, deterministically built."""
    rng = SplitMix64(seed)

    def build(bits: list[str]) -> list[str]:
        texts = []
        for _ in range(n_per_register):
            parts = [bits[rng.randbelow(len(bits))] for _ in range(sentences_per_text)]
            texts.append(" ".join(parts))
        return texts

    return build(_INVOLVED_BITS), build(_INFORMATIONAL_BITS)


@pytest.fixture(scope="session")
def catalog():
    from styleval.features import load_catalog

    return load_catalog()


@pytest.fixture(scope="session")
def metric_fixture():
    with open(FIXTURES_DIR / "metric_oracle.json", encoding="utf-8") as handle:
        return json.load(handle)


def write_ndjson(path: Path, records: list[dict]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record) + "\n")


def make_cochrane_corpus(n_test: int = 20, n_train: int = 12, seed: int = 7) -> list[dict]:
    """Small simplification corpus with formal abstracts and casual summaries."""
    rng = SplitMix64(seed)
    formal = _INFORMATIONAL_BITS
    plain = _INVOLVED_BITS
    records = []
    for i in range(n_test):
        abstract = f"Review {i}: " + " ".join(
            formal[rng.randbelow(len(formal))] for _ in range(5)
        )
        pls = f"Summary {i}: " + " ".join(
            plain[rng.randbelow(len(plain))] for _ in range(3)
        )
        records.append({"abstract": abstract, "pls": pls, "split": "test"})
    for i in range(n_train):
        abstract = f"Train review {i}: " + " ".join(
            formal[rng.randbelow(len(formal))] for _ in range(5)
        )
        pls = f"Train summary {i}: " + " ".join(
            plain[rng.randbelow(len(plain))] for _ in range(3)
        )
        records.append({"abstract": abstract, "pls": pls, "split": "train"})
    return records


def make_mud_corpus(n_authors: int = 40, seed: int = 5) -> list[dict]:
    """Synthetic social-post corpus: every author has exactly 16 posts."""
    rng = SplitMix64(seed)
    subreddits = [f"sub{i:02d}" for i in range(18)]
    bits = _INVOLVED_BITS + _INFORMATIONAL_BITS
    records = []
    for a in range(n_authors):
        author = f"author{a:03d}"
        if a % 3 == 0:
            # concentrated posting: one dominant community
            subs = [subreddits[a % len(subreddits)]] * 16
        elif a % 3 == 1:
            # diverse posting: 16 distinct communities
            start = rng.randbelow(len(subreddits))
            subs = [subreddits[(start + i) % len(subreddits)] for i in range(16)]
        else:
            subs = [subreddits[rng.randbelow(4)] for _ in range(16)]
        for p in range(16):
            text = f"{author} post {p}: " + " ".join(
                bits[rng.randbelow(len(bits))] for _ in range(3)
            )
            records.append({"author_id": author, "text": text, "subreddit": subs[p]})
    return records


def make_gyafc_corpus(n_each: int = 30, seed: int = 13) -> list[dict]:
    """Formality corpus: train pools plus test cases with references."""
    rng = SplitMix64(seed)
    records = []
    for split in ("train", "test"):
        for formality, bits in (("informal", _INVOLVED_BITS),
                                ("formal", _INFORMATIONAL_BITS)):
            count = n_each if split == "train" else n_each // 3
            for i in range(count):
                text = f"{split} {formality} {i}: " + " ".join(
                    bits[rng.randbelow(len(bits))] for _ in range(2)
                )
                record = {
                    "text": text,
                    "domain": "em",
                    "formality": formality,
                    "split": split,
                }
                if split == "test":
                    opposite = _INFORMATIONAL_BITS if formality == "informal" else _INVOLVED_BITS
                    record["references"] = [
                        f"ref {j} for {formality} {i}: " + opposite[rng.randbelow(len(opposite))]
                        for j in range(4)
                    ]
                records.append(record)
    return records
