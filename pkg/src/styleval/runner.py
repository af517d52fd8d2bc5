"""Batch execution and scoring over a pairing plan.

A run directory is the unit of resumability: one JSON record per
(case, system) pair plus a line-oriented index. Interrupted runs are
resumed by re-running only the pairs whose record file is missing.
Records carry no timestamps so reruns are byte-comparable.
"""

from __future__ import annotations

import json
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .datasets import PairingPlan
from .distances import away_towards
from .errors import (
    EmptyDocument,
    IoFailure,
    NoGoldReference,
    ScorerUnavailable,
    ZeroVector,
)
from .features import FeatureCatalog, extract_features
from .mda import MdaModel, project
from .overlap import bleu, meteor, overlap_rouge, rouge_l, rouge_n, sari
from .pipeline import (
    GENERATIVE_SYSTEMS,
    NAIVE_SYSTEMS,
    PipelineExecutor,
    PipelineRun,
    TransferCase,
)
from .providers import ChatClient, ScorerClient, ScorerRequest
from .readability import ari, fkgl
from .rng import SplitMix64, derive_seed
from .scores import ScoreVector
from .textproc import Document


def _cosine_list(u: list[float], v: list[float]) -> float:
    import math

    dot = sum(a * b for a, b in zip(u, v))
    nu = math.sqrt(sum(a * a for a in u))
    nv = math.sqrt(sum(b * b for b in v))
    if nu == 0.0 or nv == 0.0:
        raise ZeroVector("zero-norm embedding")
    return max(-1.0, min(1.0, dot / (nu * nv)))


class RunStore:
    """Filesystem layout for one run: records, scores, and an index."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.records_dir = self.root / "records"
        self.scores_dir = self.root / "scores"
        self.report_dir = self.root / "report"
        self.index_path = self.root / "index.jsonl"
        for directory in (self.records_dir, self.scores_dir):
            directory.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _name(self, case_id: str, system: str) -> str:
        return f"{case_id}__{system}.json"

    def record_path(self, case_id: str, system: str) -> Path:
        return self.records_dir / self._name(case_id, system)

    def score_path(self, case_id: str, system: str) -> Path:
        return self.scores_dir / self._name(case_id, system)

    def completed_records(self) -> set[tuple[str, str]]:
        """Pairs whose record file exists; the index alone is not trusted."""
        done = set()
        for path in self.records_dir.glob("*.json"):
            stem = path.stem
            case_id, _, system = stem.rpartition("__")
            if case_id:
                done.add((case_id, system))
        return done

    def completed_scores(self) -> set[tuple[str, str]]:
        done = set()
        for path in self.scores_dir.glob("*.json"):
            stem = path.stem
            case_id, _, system = stem.rpartition("__")
            if case_id:
                done.add((case_id, system))
        return done

    def _atomic_write(self, path: Path, payload: dict) -> None:
        tmp = path.with_suffix(".tmp")
        try:
            with open(tmp, "w", encoding="utf-8") as handle:
                json.dump(payload, handle, ensure_ascii=False, indent=2, sort_keys=True)
                handle.write("\n")
            os.replace(tmp, path)
        except OSError as exc:
            raise IoFailure(f"cannot write {path}: {exc}") from exc

    def write_record(self, run: PipelineRun) -> None:
        with self._lock:
            self._atomic_write(self.record_path(run.case_id, run.system), run.as_dict())
            with open(self.index_path, "a", encoding="utf-8") as handle:
                handle.write(
                    json.dumps({"case_id": run.case_id, "system": run.system}) + "\n"
                )

    def read_record(self, case_id: str, system: str) -> PipelineRun:
        path = self.record_path(case_id, system)
        try:
            with open(path, encoding="utf-8") as handle:
                return PipelineRun.from_dict(json.load(handle))
        except (OSError, ValueError, KeyError) as exc:
            raise IoFailure(f"cannot read {path}: {exc}") from exc

    def write_score(self, case_id: str, system: str, vector: ScoreVector) -> None:
        self._atomic_write(self.score_path(case_id, system), vector.as_dict())

    def read_score(self, case_id: str, system: str) -> dict:
        path = self.score_path(case_id, system)
        try:
            with open(path, encoding="utf-8") as handle:
                return json.load(handle)
        except (OSError, ValueError) as exc:
            raise IoFailure(f"cannot read {path}: {exc}") from exc


def execute_plan(
    plan: PairingPlan,
    systems: list[str],
    store: RunStore,
    client: ChatClient | None = None,
    seed: int = 0,
    max_new_tokens: int = 1024,
) -> dict:
    """Run every requested system over every plan case, skipping finished pairs."""
    for system in systems:
        if system not in NAIVE_SYSTEMS and system not in GENERATIVE_SYSTEMS:
            raise ValueError(f"unknown system: {system}")
    generative = [s for s in systems if s in GENERATIVE_SYSTEMS]
    if generative and client is None:
        raise ValueError("generative systems require a chat endpoint")

    done = store.completed_records()
    jobs = [
        (case, system)
        for case in plan.cases
        for system in systems
        if (case.case_id, system) not in done
    ]

    executor = PipelineExecutor(client, max_new_tokens) if client is not None else None
    counts = {"total": len(plan.cases) * len(systems), "skipped": len(plan.cases) * len(systems) - len(jobs), "ran": 0, "degraded": 0}
    counts_lock = threading.Lock()

    def run_one(case: TransferCase, system: str) -> None:
        if system in NAIVE_SYSTEMS:
            rng = SplitMix64(derive_seed(seed, "gold", case.case_id))
            from .pipeline import run_naive

            try:
                run = run_naive(case, system, rng)
            except NoGoldReference as exc:
                run = PipelineRun(
                    case.case_id, system, [], None, "", True,
                    {"error": f"NoGoldReference: {exc}"},
                )
        else:
            run = executor.run_system(case, system)
        store.write_record(run)
        with counts_lock:
            counts["ran"] += 1
            if run.degraded:
                counts["degraded"] += 1

    workers = client.config.concurrency if client is not None else 1
    if workers <= 1 or len(jobs) <= 1:
        for case, system in jobs:
            run_one(case, system)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run_one, case, system) for case, system in jobs]
            for future in futures:
                future.result()
    return counts


# --- scoring -----------------------------------------------------------------

class _EmbedCache:
    """Per-task memo for feature/sidecar embeddings of repeated texts."""

    def __init__(self, model: MdaModel, catalog: FeatureCatalog,
                 scorer: ScorerClient | None, kinds: set[str]):
        self.model = model
        self.catalog = catalog
        self.scorer = scorer
        self.kinds = kinds
        self._biber: dict[str, list[float]] = {}
        self._side: dict[tuple[str, str], list[float]] = {}

    def biber(self, text: str) -> list[float]:
        if text not in self._biber:
            doc = Document.analyze(text)
            vector = extract_features(doc, self.catalog)
            self._biber[text] = list(project(self.model, vector).scores)
        return self._biber[text]

    def sidecar(self, kind: str, text: str) -> list[float] | None:
        if self.scorer is None or kind not in self.kinds:
            return None
        key = (kind, text)
        if key not in self._side:
            try:
                request = ScorerRequest(kind=kind, texts=(text,))
                self._side[key] = self.scorer.embed(request)[0]
            except ScorerUnavailable:
                self.scorer = None
                return None
        return self._side[key]


def probe_scorer(scorer: ScorerClient | None) -> tuple[ScorerClient | None, set[str]]:
    """Health-check the sidecar; on failure run without optional metrics."""
    if scorer is None:
        return None, set()
    try:
        health = scorer.health()
    except ScorerUnavailable:
        return None, set()
    kinds = set(health.get("kinds", []))
    return scorer, kinds


def score_run(
    case: TransferCase,
    run: PipelineRun,
    cache: _EmbedCache,
) -> ScoreVector:
    """Compute the full metric vector for one non-degraded run."""
    output = run.output_text
    doc_out = Document.analyze(output)
    if doc_out.word_count == 0:
        raise EmptyDocument("output has no words")
    out_biber = list(
        project(cache.model, extract_features(doc_out, cache.catalog)).scores
    )
    in_biber = cache.biber(case.input_text)
    tgt_biber = cache.biber(case.style_exemplar)
    away_b, towards_b = away_towards(out_biber, in_biber, tgt_biber)

    doc_in = Document.analyze(case.input_text)
    doc_tgt = Document.analyze(case.style_exemplar)
    doc_refs = (
        [Document.analyze(ref) for ref in case.gold_refs] if case.gold_refs else None
    )

    o1, o2, ol = overlap_rouge(doc_out, doc_tgt)
    vector = ScoreVector(
        away_biber=away_b,
        towards_biber=towards_b,
        overlap_rouge1=o1,
        overlap_rouge2=o2,
        overlap_rougeL=ol,
    )

    if case.task == "mud" or not doc_refs:
        vector.meteor = meteor(doc_out, doc_in)
    else:
        vector.meteor = max(meteor(doc_out, ref) for ref in doc_refs)

    vector.fkgl = fkgl(doc_out)
    vector.ari = ari(doc_out)

    if doc_refs:
        vector.rouge1 = max(rouge_n(doc_out, ref, 1) for ref in doc_refs)
        vector.rouge2 = max(rouge_n(doc_out, ref, 2) for ref in doc_refs)
        vector.rougeL = max(rouge_l(doc_out, ref) for ref in doc_refs)
        vector.bleu = bleu(doc_out, doc_refs)
        vector.sari = sari(doc_in, doc_out, doc_refs)

    # Optional sidecar-backed metrics; each degrades independently.
    for kind, away_name, towards_name in (
        ("embed_luar", "away_luar", "towards_luar"),
        ("embed_stylecav", "away_stylecav", "towards_stylecav"),
    ):
        out_e = cache.sidecar(kind, output)
        in_e = cache.sidecar(kind, case.input_text)
        tgt_e = cache.sidecar(kind, case.style_exemplar)
        if out_e is not None and in_e is not None and tgt_e is not None:
            try:
                away, towards = away_towards(out_e, in_e, tgt_e)
            except ZeroVector:
                continue
            setattr(vector, away_name, away)
            setattr(vector, towards_name, towards)

    out_s = cache.sidecar("embed_sbert", output)
    in_s = cache.sidecar("embed_sbert", case.input_text)
    if out_s is not None and in_s is not None:
        try:
            vector.sbert_sim = _cosine_list(out_s, in_s)
        except ZeroVector:
            pass

    if cache.scorer is not None:
        if "score_mis" in cache.kinds:
            try:
                request = ScorerRequest(
                    kind="score_mis", pairs=((output, case.input_text),)
                )
                vector.mis = cache.scorer.score(request)[0]
            except ScorerUnavailable:
                cache.scorer = None
        if cache.scorer is not None and "score_cola" in cache.kinds:
            try:
                request = ScorerRequest(kind="score_cola", texts=(output,))
                vector.cola = cache.scorer.score(request)[0]
            except ScorerUnavailable:
                cache.scorer = None
        if (
            cache.scorer is not None
            and case.task == "gyafc"
            and "classify_formality" in cache.kinds
        ):
            try:
                request = ScorerRequest(kind="classify_formality", texts=(output,))
                vector.formality_prob = cache.scorer.score(request)[0]
            except ScorerUnavailable:
                cache.scorer = None
    return vector


def score_plan(
    plan: PairingPlan,
    systems: list[str],
    store: RunStore,
    model: MdaModel,
    catalog: FeatureCatalog,
    scorer: ScorerClient | None = None,
) -> dict:
    """Score every completed, non-degraded record lacking a score file."""
    scorer, kinds = probe_scorer(scorer)
    cache = _EmbedCache(model, catalog, scorer, kinds)
    done = store.completed_scores()
    counts = {"scored": 0, "skipped": 0, "degraded": 0, "unscorable": 0}
    for case in plan.cases:
        for system in systems:
            key = (case.case_id, system)
            if not store.record_path(*key).exists():
                continue
            run = store.read_record(*key)
            if run.degraded:
                counts["degraded"] += 1
                continue
            if key in done:
                counts["skipped"] += 1
                continue
            try:
                vector = score_run(case, run, cache)
            except (EmptyDocument, ZeroVector) as exc:
                run.degraded = True
                run.meta["error"] = f"unscorable output: {exc}"
                store.write_record(run)
                counts["unscorable"] += 1
                counts["degraded"] += 1
                continue
            store.write_score(case.case_id, system, vector)
            counts["scored"] += 1
    return counts


def collect_results(
    plan: PairingPlan,
    systems: list[str],
    store: RunStore,
) -> dict[str, list[tuple[PipelineRun, ScoreVector | None]]]:
    """Load records and scores grouped by system, in plan order."""
    results: dict[str, list[tuple[PipelineRun, ScoreVector | None]]] = {}
    for system in systems:
        pairs = []
        for case in plan.cases:
            if not store.record_path(case.case_id, system).exists():
                continue
            run = store.read_record(case.case_id, system)
            vector = None
            if store.score_path(case.case_id, system).exists():
                data = store.read_score(case.case_id, system)
                known = {f for f in ScoreVector.metric_names()}
                fields = {k: v for k, v in data.items() if k in known}
                vector = ScoreVector(**fields)
            pairs.append((run, vector))
        results[system] = pairs
    return results


def frontier_axes(task: str, summaries) -> tuple[str, str]:
    """Default x/y metric names for the trade-off scatter on a task."""
    x_metric = "towards_biber"
    if task == "cochrane":
        return x_metric, "rouge1"
    for candidate in ("mis", "sbert_sim", "meteor"):
        if any(s.means.get(candidate) is not None for s in summaries):
            return x_metric, candidate
    return x_metric, "meteor"


__all__ = [
    "RunStore",
    "execute_plan",
    "score_plan",
    "score_run",
    "collect_results",
    "probe_scorer",
    "frontier_axes",
]
