"""Run directory layout, batch execution, resumability, and scoring."""

import json

import pytest

from styleval.datasets import PairingPlan
from styleval.errors import IoFailure, ScorerUnavailable
from styleval.features import extract_features, load_catalog
from styleval.mda import MdaFitConfig, fit_mda
from styleval.pipeline import PipelineRun, TransferCase
from styleval.providers import ScorerRequest
from styleval.rng import SplitMix64, derive_seed
from styleval.runner import (
    RunStore,
    collect_results,
    execute_plan,
    frontier_axes,
    probe_scorer,
    score_plan,
    score_run,
)
from styleval.runner import _EmbedCache
from styleval.scores import ScoreVector
from styleval.textproc import Document

from conftest import synthetic_register_texts

CATALOG = load_catalog()


def fit_small_model(dimensions=3):
    involved, informational = synthetic_register_texts(12, seed=31)
    vectors = [
        extract_features(Document.analyze(t), CATALOG)
        for t in involved + informational
    ]
    return fit_mda(
        vectors, [f.name for f in CATALOG.features], MdaFitConfig(dimensions=dimensions)
    )


MODEL = fit_small_model()


def small_plan(n=3, with_refs=True):
    involved, informational = synthetic_register_texts(2 * n + 2, seed=47)
    cases = []
    for i in range(n):
        cases.append(
            TransferCase(
                case_id=f"case-{i:02d}",
                input_text=informational[i],
                style_exemplar=involved[i],
                task="cochrane" if with_refs else "mud",
                gold_refs=(involved[n + i], informational[n + i]) if with_refs else None,
            )
        )
    task = "cochrane" if with_refs else "mud"
    return PairingPlan(task=task, variant=task, seed=5, cases=cases)


class StubChat:
    """Chat client stand-in driven by prompt markers, like the mock server."""

    class _Config:
        model = "stub"
        concurrency = 1

    config = _Config()

    def __init__(self):
        self.calls = 0

    def chat(self, request):
        self.calls += 1
        prompt = request.messages[-1][1]
        if "List some adjectives" in prompt:
            return "breezy, direct"
        if "Paraphrase the passage" in prompt:
            return "a neutral retelling of the passage"
        if "dimensions of register variation" in prompt:
            return "The register is involved rather than informational."
        return "Honestly, I think you should just take the finding at face value."


# --- store -------------------------------------------------------------------

def test_store_record_round_trip(tmp_path):
    store = RunStore(tmp_path / "run")
    run = PipelineRun("c1", "copy", [("p", "r")], ["warm"], "out", False, {"k": "v"})
    store.write_record(run)
    assert store.read_record("c1", "copy") == run
    assert store.completed_records() == {("c1", "copy")}
    index_lines = store.index_path.read_text().splitlines()
    assert json.loads(index_lines[0]) == {"case_id": "c1", "system": "copy"}


def test_store_score_round_trip(tmp_path):
    store = RunStore(tmp_path / "run")
    vector = ScoreVector(away_biber=0.25, towards_biber=0.75, meteor=0.5)
    store.write_score("c1", "copy", vector)
    data = store.read_score("c1", "copy")
    assert data["away_biber"] == 0.25
    assert data["meteor"] == 0.5
    assert data["mis"] is None
    assert store.completed_scores() == {("c1", "copy")}


def test_store_trusts_files_not_index(tmp_path):
    store = RunStore(tmp_path / "run")
    for case_id in ("a", "b"):
        store.write_record(PipelineRun(case_id, "copy", [], None, "out", False))
    store.record_path("a", "copy").unlink()
    assert store.completed_records() == {("b", "copy")}
    assert len(store.index_path.read_text().splitlines()) == 2


def test_store_missing_reads_raise(tmp_path):
    store = RunStore(tmp_path / "run")
    with pytest.raises(IoFailure):
        store.read_record("ghost", "copy")
    with pytest.raises(IoFailure):
        store.read_score("ghost", "copy")


def test_store_double_underscore_in_case_id(tmp_path):
    store = RunStore(tmp_path / "run")
    store.write_record(PipelineRun("odd__id", "gold", [], None, "x", False))
    assert store.completed_records() == {("odd__id", "gold")}
    assert store.read_record("odd__id", "gold").case_id == "odd__id"


def test_store_leaves_no_temp_files(tmp_path):
    store = RunStore(tmp_path / "run")
    store.write_record(PipelineRun("c", "copy", [], None, "x", False))
    store.write_score("c", "copy", ScoreVector(0.0, 1.0))
    assert not list(store.root.rglob("*.tmp"))


# --- execution ---------------------------------------------------------------

def test_execute_plan_naive_only(tmp_path):
    plan = small_plan()
    store = RunStore(tmp_path / "run")
    counts = execute_plan(plan, ["copy", "target", "gold"], store, seed=5)
    assert counts == {"total": 9, "skipped": 0, "ran": 9, "degraded": 0}
    run = store.read_record("case-00", "copy")
    assert run.output_text == plan.cases[0].input_text
    assert store.read_record("case-00", "target").output_text == (
        plan.cases[0].style_exemplar
    )


def test_execute_plan_gold_choice_is_seeded_per_case(tmp_path):
    plan = small_plan()
    store = RunStore(tmp_path / "run")
    execute_plan(plan, ["gold"], store, seed=5)
    for case in plan.cases:
        rng = SplitMix64(derive_seed(5, "gold", case.case_id))
        expected = case.gold_refs[rng.randbelow(len(case.gold_refs))]
        assert store.read_record(case.case_id, "gold").output_text == expected


def test_execute_plan_gold_without_refs_degrades(tmp_path):
    plan = small_plan(with_refs=False)
    store = RunStore(tmp_path / "run")
    counts = execute_plan(plan, ["gold"], store)
    assert counts["degraded"] == len(plan.cases)
    run = store.read_record("case-00", "gold")
    assert run.degraded
    assert "NoGoldReference" in run.meta["error"]


def test_execute_plan_validates_inputs(tmp_path):
    plan = small_plan()
    store = RunStore(tmp_path / "run")
    with pytest.raises(ValueError):
        execute_plan(plan, ["copy", "mystery"], store)
    with pytest.raises(ValueError):
        execute_plan(plan, ["simple"], store)  # generative without a client


def test_execute_plan_resume_skips_existing_records(tmp_path):
    plan = small_plan()
    store = RunStore(tmp_path / "run")
    client = StubChat()
    systems = ["copy", "simple", "styll"]
    first = execute_plan(plan, systems, store, client=client)
    assert first["ran"] == 9
    assert client.calls == len(plan.cases) * (1 + 3)  # simple 1 + styll 3

    again = execute_plan(plan, systems, store, client=client)
    assert again == {"total": 9, "skipped": 9, "ran": 0, "degraded": 0}
    assert client.calls == len(plan.cases) * 4  # untouched

    store.record_path("case-01", "styll").unlink()
    resumed = execute_plan(plan, systems, store, client=client)
    assert resumed["ran"] == 1
    assert resumed["skipped"] == 8
    assert client.calls == len(plan.cases) * 4 + 3  # one styll redo


def test_execute_plan_concurrent_workers(tmp_path):
    plan = small_plan(n=4)
    store = RunStore(tmp_path / "run")
    client = StubChat()
    client.config = type("C", (), {"model": "stub", "concurrency": 4})()
    counts = execute_plan(plan, ["copy", "simple"], store, client=client)
    assert counts["ran"] == 8
    assert store.completed_records() == {
        (c.case_id, s) for c in plan.cases for s in ("copy", "simple")
    }


# --- scoring -----------------------------------------------------------------

def offline_cache():
    return _EmbedCache(MODEL, CATALOG, None, set())


def test_score_run_reference_mapping():
    plan = small_plan()
    case = plan.cases[0]
    cache = offline_cache()

    copy_run = PipelineRun(case.case_id, "copy", [], None, case.input_text, False)
    copy_vector = score_run(case, copy_run, cache)
    assert copy_vector.away_biber == pytest.approx(0.0, abs=1e-9)
    assert copy_vector.sari is not None
    assert copy_vector.fkgl is not None and copy_vector.ari is not None
    assert copy_vector.mis is None and copy_vector.cola is None

    target_run = PipelineRun(case.case_id, "target", [], None, case.style_exemplar, False)
    target_vector = score_run(case, target_run, cache)
    assert target_vector.towards_biber == pytest.approx(1.0, abs=1e-9)
    assert target_vector.overlap_rouge1 == pytest.approx(1.0)
    assert target_vector.overlap_rouge2 == pytest.approx(1.0)
    assert target_vector.overlap_rougeL == pytest.approx(1.0)

    gold_run = PipelineRun(case.case_id, "gold", [], None, case.gold_refs[0], False)
    gold_vector = score_run(case, gold_run, cache)
    assert gold_vector.rouge1 == pytest.approx(1.0)
    assert gold_vector.rouge2 == pytest.approx(1.0)
    assert gold_vector.rougeL == pytest.approx(1.0)
    assert gold_vector.bleu == pytest.approx(1.0)


def test_score_run_meteor_reference_choice():
    from styleval.overlap import meteor

    cochrane = small_plan()
    case = cochrane.cases[0]
    cache = offline_cache()
    run = PipelineRun(case.case_id, "copy", [], None, case.gold_refs[0], False)
    vector = score_run(case, run, cache)
    doc_out = Document.analyze(run.output_text)
    expected = max(
        meteor(doc_out, Document.analyze(ref)) for ref in case.gold_refs
    )
    assert vector.meteor == pytest.approx(expected)  # max over refs, near 1
    assert vector.meteor > 0.999

    mud = small_plan(with_refs=False)
    mud_case = mud.cases[0]
    mud_run = PipelineRun(mud_case.case_id, "copy", [], None, mud_case.input_text, False)
    mud_vector = score_run(mud_case, mud_run, cache)
    doc_in = Document.analyze(mud_case.input_text)
    assert mud_vector.meteor == pytest.approx(meteor(doc_in, doc_in))  # vs input
    assert mud_vector.rouge1 is None and mud_vector.bleu is None


def test_score_plan_writes_scores_and_skips(tmp_path):
    plan = small_plan()
    store = RunStore(tmp_path / "run")
    execute_plan(plan, ["copy", "target"], store)
    counts = score_plan(plan, ["copy", "target"], store, MODEL, CATALOG)
    assert counts["scored"] == 6
    again = score_plan(plan, ["copy", "target"], store, MODEL, CATALOG)
    assert again["scored"] == 0
    assert again["skipped"] == 6


def test_score_plan_marks_wordless_output_unscorable(tmp_path):
    plan = small_plan()
    store = RunStore(tmp_path / "run")
    execute_plan(plan, ["copy"], store)
    broken = store.read_record("case-00", "copy")
    broken.output_text = "... !!!"
    store.write_record(broken)
    counts = score_plan(plan, ["copy"], store, MODEL, CATALOG)
    assert counts["unscorable"] == 1
    assert counts["scored"] == 2
    rewritten = store.read_record("case-00", "copy")
    assert rewritten.degraded
    assert "unscorable output" in rewritten.meta["error"]
    assert not store.score_path("case-00", "copy").exists()


def test_score_plan_skips_degraded_records(tmp_path):
    plan = small_plan(with_refs=False)
    store = RunStore(tmp_path / "run")
    execute_plan(plan, ["gold"], store)  # all degraded: no references
    counts = score_plan(plan, ["gold"], store, MODEL, CATALOG)
    assert counts == {"scored": 0, "skipped": 0, "degraded": 3, "unscorable": 0}


# --- sidecar degradation -----------------------------------------------------

class FlakyScorer:
    """Scorer whose embed/score calls fail after a budget of successes."""

    def __init__(self, successes=0, kinds=("embed_sbert", "score_mis", "score_cola")):
        self.successes = successes
        self.kinds = list(kinds)

    def health(self):
        return {"status": "ok", "kinds": self.kinds}

    def _tick(self):
        if self.successes <= 0:
            raise ScorerUnavailable("budget exhausted")
        self.successes -= 1

    def embed(self, request):
        self._tick()
        return [[1.0, 2.0, 2.0]] * len(request.texts)

    def score(self, request):
        self._tick()
        n = len(request.texts or request.pairs or ())
        return [0.625] * n


def test_probe_scorer_handles_absence_and_health():
    assert probe_scorer(None) == (None, set())
    scorer = FlakyScorer()
    probed, kinds = probe_scorer(scorer)
    assert probed is scorer
    assert kinds == {"embed_sbert", "score_mis", "score_cola"}

    class Dead:
        def health(self):
            raise ScorerUnavailable("no sidecar")

    assert probe_scorer(Dead()) == (None, set())


def test_score_run_with_sidecar_fills_optional_metrics():
    plan = small_plan()
    case = plan.cases[0]
    scorer = FlakyScorer(successes=100)
    cache = _EmbedCache(MODEL, CATALOG, scorer, set(scorer.kinds))
    run = PipelineRun(case.case_id, "copy", [], None, case.input_text, False)
    vector = score_run(case, run, cache)
    assert vector.sbert_sim == pytest.approx(1.0)  # identical embeddings
    assert vector.mis == pytest.approx(0.625)
    assert vector.cola == pytest.approx(0.625)
    assert vector.formality_prob is None  # not a formality task
    assert vector.away_luar is None  # kind not advertised


def test_score_run_degrades_when_sidecar_dies_midway():
    plan = small_plan()
    case = plan.cases[0]
    scorer = FlakyScorer(successes=1)
    cache = _EmbedCache(MODEL, CATALOG, scorer, set(scorer.kinds))
    run = PipelineRun(case.case_id, "copy", [], None, case.input_text, False)
    vector = score_run(case, run, cache)
    assert vector.away_biber is not None  # native metrics survive
    assert vector.mis is None
    assert cache.scorer is None  # dropped after the failure


def test_embed_cache_memoizes_sidecar_calls():
    scorer = FlakyScorer(successes=2)
    cache = _EmbedCache(MODEL, CATALOG, scorer, {"embed_sbert"})
    first = cache.sidecar("embed_sbert", "repeat me")
    second = cache.sidecar("embed_sbert", "repeat me")
    assert first == second
    assert scorer.successes == 1  # one network call for two lookups
    assert cache.sidecar("embed_luar", "x") is None  # kind not advertised


# --- result assembly ---------------------------------------------------------

def test_collect_results_pairs_records_with_scores(tmp_path):
    plan = small_plan()
    store = RunStore(tmp_path / "run")
    execute_plan(plan, ["copy", "gold"], store, seed=5)
    score_plan(plan, ["copy"], store, MODEL, CATALOG)  # gold left unscored
    results = collect_results(plan, ["copy", "gold"], store)
    assert len(results["copy"]) == 3
    assert all(isinstance(v, ScoreVector) for _, v in results["copy"])
    assert all(v is None for _, v in results["gold"])
    ids = [run.case_id for run, _ in results["copy"]]
    assert ids == [c.case_id for c in plan.cases]  # plan order


def test_frontier_axes_selection():
    class S:
        def __init__(self, means):
            self.means = means

    assert frontier_axes("cochrane", []) == ("towards_biber", "rouge1")
    with_mis = [S({"mis": 0.5, "sbert_sim": 0.5, "meteor": 0.5})]
    assert frontier_axes("mud", with_mis) == ("towards_biber", "mis")
    no_mis = [S({"mis": None, "sbert_sim": 0.5, "meteor": 0.5})]
    assert frontier_axes("mud", no_mis) == ("towards_biber", "sbert_sim")
    native_only = [S({"mis": None, "sbert_sim": None, "meteor": 0.5})]
    assert frontier_axes("gyafc", native_only) == ("towards_biber", "meteor")
    assert frontier_axes("mud", []) == ("towards_biber", "meteor")
