"""Corpus ingestion and evaluation-case construction.

Three corpus schemas (newline-delimited JSON): social-media author posts
(mud), formality rewrites (gyafc), and medical abstract/plain-language
pairs (cochrane). Plans built from them are fully reproducible from the
embedded seed.
"""

from __future__ import annotations

import hashlib
import json
import os
from collections import Counter
from dataclasses import dataclass, field

from .errors import (
    InsufficientAuthors,
    InsufficientPool,
    IoFailure,
    SchemaViolation,
)
from .pipeline import TransferCase
from .rng import SplitMix64, derive_seed

MUD_POSTS_PER_AUTHOR = 16
GYAFC_DEFAULT_K = 16
EXEMPLAR_SEPARATOR = "\n"


@dataclass(frozen=True)
class AuthorCorpus:
    author_id: str
    posts: tuple[tuple[str, str], ...]  # (text, subreddit)
    split: str = ""


@dataclass(frozen=True)
class GyafcRecord:
    text: str
    domain: str
    formality: str
    split: str
    references: tuple[str, ...] = ()


@dataclass(frozen=True)
class CochraneRecord:
    abstract: str
    pls: str
    split: str


@dataclass
class PairingPlan:
    task: str
    variant: str
    seed: int
    cases: list[TransferCase]
    meta: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "task": self.task,
            "variant": self.variant,
            "seed": self.seed,
            "meta": self.meta,
            "cases": [
                {
                    "case_id": c.case_id,
                    "input_text": c.input_text,
                    "style_exemplar": c.style_exemplar,
                    "task": c.task,
                    "gold_refs": list(c.gold_refs) if c.gold_refs else None,
                    "meta": c.meta,
                }
                for c in self.cases
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PairingPlan":
        cases = [
            TransferCase(
                case_id=c["case_id"],
                input_text=c["input_text"],
                style_exemplar=c["style_exemplar"],
                task=c["task"],
                gold_refs=tuple(c["gold_refs"]) if c.get("gold_refs") else None,
                meta=c.get("meta", {}),
            )
            for c in data["cases"]
        ]
        return cls(data["task"], data["variant"], data["seed"], cases, data.get("meta", {}))

    def digest(self) -> str:
        blob = json.dumps(self.as_dict(), sort_keys=True, ensure_ascii=True)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def save_plan(plan: PairingPlan, path: str) -> None:
    try:
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(plan.as_dict(), fh, ensure_ascii=False, indent=1)
            fh.write("\n")
        os.replace(tmp, path)
    except OSError as exc:
        raise IoFailure(f"cannot write plan {path}: {exc}") from exc


def load_plan(path: str) -> PairingPlan:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return PairingPlan.from_dict(json.load(fh))
    except OSError as exc:
        raise IoFailure(f"cannot read plan {path}: {exc}") from exc
    except (json.JSONDecodeError, KeyError) as exc:
        raise IoFailure(f"plan file {path} is malformed: {exc}") from exc


# --- corpus loading ----------------------------------------------------------

_SCHEMAS = {
    "mud": ("author_id", "text", "subreddit"),
    "gyafc": ("text", "domain", "formality", "split"),
    "cochrane": ("abstract", "pls", "split"),
}


def _read_records(path: str, schema: str):
    required = _SCHEMAS[schema]
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise IoFailure(f"cannot read corpus {path}: {exc}") from exc
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaViolation(number, f"invalid JSON: {exc.msg}")
        if not isinstance(record, dict):
            raise SchemaViolation(number, "record is not a JSON object")
        for name in required:
            if name not in record:
                raise SchemaViolation(number, f"missing required field {name!r}")
            if not isinstance(record[name], str) or not record[name]:
                raise SchemaViolation(number, f"field {name!r} must be a nonempty string")
        yield number, record


def load_corpus(path: str, schema: str):
    """Validated records grouped per the schema.

    mud → list of AuthorCorpus (authors without exactly 16 posts are
    dropped and reported in the returned metadata); gyafc → list of
    GyafcRecord; cochrane → list of CochraneRecord.
    """
    if schema not in _SCHEMAS:
        raise ValueError(f"unknown corpus schema {schema!r}")
    if schema == "mud":
        posts: dict[str, list[tuple[str, str]]] = {}
        splits: dict[str, str] = {}
        for number, record in _read_records(path, schema):
            author = record["author_id"]
            posts.setdefault(author, []).append((record["text"], record["subreddit"]))
            splits[author] = record.get("split", "")
        authors = []
        dropped = []
        for author in sorted(posts):
            if len(posts[author]) == MUD_POSTS_PER_AUTHOR:
                authors.append(AuthorCorpus(author, tuple(posts[author]), splits[author]))
            else:
                dropped.append(author)
        return authors, dropped
    if schema == "gyafc":
        records = []
        for number, record in _read_records(path, schema):
            if record["formality"] not in ("formal", "informal"):
                raise SchemaViolation(
                    number, f"formality must be formal or informal, got {record['formality']!r}"
                )
            refs = record.get("references", [])
            if not isinstance(refs, list) or any(not isinstance(r, str) for r in refs):
                raise SchemaViolation(number, "references must be a list of strings")
            records.append(
                GyafcRecord(
                    record["text"], record["domain"], record["formality"],
                    record["split"], tuple(refs),
                )
            )
        return records
    records = []
    for number, record in _read_records(path, schema):
        records.append(CochraneRecord(record["abstract"], record["pls"], record["split"]))
    return records


# --- author pairing ----------------------------------------------------------

def _mud_eligible(authors: list[AuthorCorpus], variant: str) -> list[AuthorCorpus]:
    if variant == "random":
        return list(authors)
    if variant == "single":
        counts = Counter(sub for a in authors for _, sub in a.posts)
        if not counts:
            return []
        # break count ties by lexicographically smallest subreddit
        best_count = max(counts.values())
        top_sub = min(s for s, c in counts.items() if c == best_count)
        return [a for a in authors if all(sub == top_sub for _, sub in a.posts)]
    if variant == "diverse":
        return [
            a for a in authors
            if len({sub for _, sub in a.posts}) >= 13
        ]
    raise ValueError(f"unknown pairing variant {variant!r}")


def select_mud_authors(
    authors: list[AuthorCorpus],
    variant: str,
    seed: int,
    n_each: int = 15,
    source_split: str | None = None,
    target_split: str | None = None,
) -> tuple[list[AuthorCorpus], list[AuthorCorpus]]:
    """Seeded selection of source and target authors for one variant.

    When split names are given, each side draws only from its split;
    otherwise both sides draw from the whole corpus and are kept disjoint.
    """
    def pool(split: str | None) -> list[AuthorCorpus]:
        chosen = [a for a in authors if split is None or a.split == split]
        return _mud_eligible(chosen, variant)

    source_pool = sorted(pool(source_split), key=lambda a: a.author_id)
    target_pool = sorted(pool(target_split), key=lambda a: a.author_id)

    rng = SplitMix64(derive_seed(seed, "mud-authors", variant))
    if len(source_pool) < n_each:
        raise InsufficientAuthors(variant, len(source_pool), n_each)
    sources = sorted(rng.sample(source_pool, n_each), key=lambda a: a.author_id)
    taken = {a.author_id for a in sources}
    remaining = [a for a in target_pool if a.author_id not in taken]
    if source_split is not None and source_split != target_split:
        remaining = target_pool
    if len(remaining) < n_each:
        raise InsufficientAuthors(variant, len(remaining), n_each)
    targets = sorted(rng.sample(remaining, n_each), key=lambda a: a.author_id)
    return sources, targets


def build_mud_cases(
    sources: list[AuthorCorpus],
    targets: list[AuthorCorpus],
    variant: str,
    seed: int,
) -> PairingPlan:
    """One case per (source post, target author); exemplar joins the
    target author's posts with single newlines in stored order."""
    cases = []
    for source in sources:
        for post_index, (text, subreddit) in enumerate(source.posts):
            for target in targets:
                exemplar = EXEMPLAR_SEPARATOR.join(post for post, _ in target.posts)
                cases.append(
                    TransferCase(
                        case_id=(
                            f"mud-{variant}-{source.author_id}-p{post_index:02d}"
                            f"-{target.author_id}"
                        ),
                        input_text=text,
                        style_exemplar=exemplar,
                        task="mud",
                        meta={
                            "source_author": source.author_id,
                            "post_index": post_index,
                            "source_subreddit": subreddit,
                            "target_author": target.author_id,
                        },
                    )
                )
    return PairingPlan(
        task="mud",
        variant=variant,
        seed=seed,
        cases=cases,
        meta={
            "separator": EXEMPLAR_SEPARATOR,
            "sources": [a.author_id for a in sources],
            "targets": [a.author_id for a in targets],
        },
    )


def build_gyafc_cases(
    records: list[GyafcRecord],
    domain: str,
    direction: str,
    k: int = GYAFC_DEFAULT_K,
    seed: int = 0,
) -> PairingPlan:
    """Formality-transfer cases: inputs from the test split, exemplars
    concatenated from k seeded-random train texts of the opposite
    formality in the same domain, sampled fresh per input."""
    if direction not in ("i2f", "f2i"):
        raise ValueError(f"direction must be i2f or f2i, got {direction!r}")
    input_formality = "informal" if direction == "i2f" else "formal"
    pool_formality = "formal" if direction == "i2f" else "informal"

    inputs = [
        r for r in records
        if r.domain == domain and r.split == "test" and r.formality == input_formality
    ]
    pool = [
        r.text for r in records
        if r.domain == domain and r.split == "train" and r.formality == pool_formality
    ]
    cases = []
    for index, record in enumerate(inputs):
        gold = record.references
        eligible = [t for t in pool if t not in gold]
        if len(eligible) < k:
            raise InsufficientPool(
                f"gyafc {domain}/{direction}: pool has {len(eligible)} usable texts, need {k}"
            )
        rng = SplitMix64(derive_seed(seed, "gyafc", domain, direction, index))
        exemplar = EXEMPLAR_SEPARATOR.join(rng.sample(eligible, k))
        cases.append(
            TransferCase(
                case_id=f"gyafc-{domain}-{direction}-{index:04d}",
                input_text=record.text,
                style_exemplar=exemplar,
                task="gyafc",
                gold_refs=gold if gold else None,
                meta={
                    "domain": domain,
                    "direction": direction,
                    "desired_formality": pool_formality,
                },
            )
        )
    return PairingPlan(
        task="gyafc",
        variant=f"{domain}_{direction}",
        seed=seed,
        cases=cases,
        meta={"separator": EXEMPLAR_SEPARATOR, "k": k, "pool_size": len(pool)},
    )


def build_cochrane_cases(records: list[CochraneRecord], seed: int = 0) -> PairingPlan:
    """Simplification cases: test abstracts as inputs, one seeded-random
    train plain-language summary as each exemplar, the case's own summary
    as the gold reference."""
    inputs = [r for r in records if r.split == "test"]
    train_pls = [r.pls for r in records if r.split == "train"]
    if not train_pls:
        raise InsufficientPool("cochrane: train split is empty")
    cases = []
    for index, record in enumerate(inputs):
        eligible = [t for t in train_pls if t != record.pls]
        if not eligible:
            raise InsufficientPool(
                f"cochrane case {index}: no train summary differs from the gold one"
            )
        rng = SplitMix64(derive_seed(seed, "cochrane", index))
        exemplar = eligible[rng.randbelow(len(eligible))]
        cases.append(
            TransferCase(
                case_id=f"cochrane-{index:04d}",
                input_text=record.abstract,
                style_exemplar=exemplar,
                task="cochrane",
                gold_refs=(record.pls,),
                meta={},
            )
        )
    return PairingPlan(
        task="cochrane",
        variant="cochrane",
        seed=seed,
        cases=cases,
        meta={"train_pool_size": len(train_pls)},
    )
