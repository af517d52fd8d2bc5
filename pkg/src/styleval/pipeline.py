"""Prompt templates and the four rewriting pipelines plus naive baselines.

Each pipeline takes a transfer case (input text plus style exemplar),
drives the chat provider through its prompt sequence, and records every
prompt and raw response. Failures mark the run degraded instead of
raising, so batch runs always complete.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import MissingBinding, NoGoldReference, ProviderError
from .providers import ChatClient, ChatRequest
from .rng import SplitMix64

GENERATIVE_SYSTEMS = ("simple", "styll", "rg", "rg_contrastive")
NAIVE_SYSTEMS = ("copy", "target", "gold")
ALL_SYSTEMS = NAIVE_SYSTEMS + GENERATIVE_SYSTEMS


@dataclass(frozen=True)
class TransferCase:
    case_id: str
    input_text: str
    style_exemplar: str
    task: str  # mud | gyafc | cochrane
    gold_refs: tuple[str, ...] | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.input_text or not self.style_exemplar:
            raise ValueError("transfer case needs nonempty input and exemplar")


@dataclass
class PipelineRun:
    case_id: str
    system: str
    step_outputs: list[tuple[str, str]]  # (prompt_text, raw_response)
    descriptors: list[str] | None
    output_text: str
    degraded: bool
    meta: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "case_id": self.case_id,
            "system": self.system,
            "step_outputs": [list(pair) for pair in self.step_outputs],
            "descriptors": self.descriptors,
            "output_text": self.output_text,
            "degraded": self.degraded,
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineRun":
        return cls(
            case_id=data["case_id"],
            system=data["system"],
            step_outputs=[tuple(pair) for pair in data["step_outputs"]],
            descriptors=data["descriptors"],
            output_text=data["output_text"],
            degraded=data["degraded"],
            meta=data.get("meta", {}),
        )


@dataclass(frozen=True)
class PromptTemplate:
    system: str
    step: int
    body: str

    def placeholders(self) -> list[str]:
        return re.findall(r"\{([a-z_]+)\}", self.body)


TEMPLATES: dict[tuple[str, int], PromptTemplate] = {
    (system, step): PromptTemplate(system, step, body)
    for system, step, body in [
        (
            "simple", 1,
            "Here is the target text {target_text} Rewrite {input_text} into the "
            "authorship style of the target text. Strictly output only the rewritten "
            "text without any other content.",
        ),
        (
            "styll", 1,
            "Source text: Passage: {source_text} Paraphrase the passage in a simple "
            "neutral style.",
        ),
        (
            "styll", 2,
            "Passage: {target_text} List some adjectives, comma-separated, that "
            "describe the writing style of the author of this passage. Strictly "
            "output only the style descriptors without any other content.",
        ),
        (
            "styll", 3,
            "Here is a text: {neutral_paraphrase} Here is a rewrite of the text that "
            "is more {style_descriptors}. Strictly output only the rewritten text "
            "without any other content.",
        ),
        (
            "rg_contrastive", 1,
            "Source text: {source_text} Target text: {target_text} How does the "
            "target text differ from the source text in authorship style in terms of "
            "dimensions of register variation according to Douglas Biber?",
        ),
        (
            "rg_contrastive", 2,
            "Style comparisons: {style_comparisons} List some adjectives, "
            "comma-separated, that describe the writing style of the author of the "
            "target text. Strictly output only the style descriptors without any "
            "other content.",
        ),
        (
            "rg_contrastive", 3,
            "Here is a text: {source_text} Rewrite the text to be more "
            "{style_descriptors}. Strictly output only the rewritten text without "
            "any other content.",
        ),
        (
            "rg", 1,
            "Passage: {target_text} Analyze the authorship style of this passage in "
            "terms of dimensions of register variation according to Douglas Biber.",
        ),
        (
            "rg", 2,
            "Style analysis: {style_analysis} List some adjectives, comma-separated, "
            "that describe the writing style of the author of the target text. "
            "Strictly output only the style descriptors without any other content.",
        ),
        (
            "rg", 3,
            "Here is a text: {source_text} Rewrite the text to be more "
            "{style_descriptors}. Strictly output only the rewritten text without "
            "any other content.",
        ),
    ]
}


def render_prompt(template: PromptTemplate, bindings: dict[str, str]) -> str:
    """Substitute placeholders; unbound names raise MissingBinding."""
    def lookup(match: re.Match) -> str:
        name = match.group(1)
        if name not in bindings:
            raise MissingBinding(
                f"template {template.system} step {template.step} needs {name!r}"
            )
        return bindings[name]

    return re.sub(r"\{([a-z_]+)\}", lookup, template.body)


_QUOTE_PAIRS = [('"', '"'), ("'", "'"), ("“", "”"), ("‘", "’")]
_LABEL_RE = re.compile(r"^rewritten text\s*:\s*", re.IGNORECASE)


def trim_response(raw: str) -> str:
    """Strip whitespace, a leading 'Rewritten text:' label, and one matched
    pair of surrounding quotes."""
    s = raw.strip()
    s = _LABEL_RE.sub("", s).strip()
    for left, right in _QUOTE_PAIRS:
        if len(s) >= 2 and s.startswith(left) and s.endswith(right):
            s = s[1:-1].strip()
            break
    return s


_BULLET_RE = re.compile(r"^\s*(?:[-*•·]+|\d+[.)])\s*")


def parse_descriptors(raw: str) -> list[str]:
    """Descriptor list from a comma/newline separated model response.

    Trims whitespace, bullets and surrounding quotes, lowercases, drops
    empties, and deduplicates preserving first occurrence.
    """
    out: list[str] = []
    seen: set[str] = set()
    for piece in re.split(r"[,\n]", raw):
        piece = _BULLET_RE.sub("", piece.strip())
        piece = piece.strip("\"'“”‘’").strip()
        piece = piece.rstrip(".").strip()
        if not piece:
            continue
        word = piece.lower()
        if word not in seen:
            seen.add(word)
            out.append(word)
    return out


class PipelineExecutor:
    """Runs the prompting systems for one chat provider."""

    def __init__(self, client: ChatClient, max_new_tokens: int = 1024):
        self.client = client
        self.max_new_tokens = max_new_tokens

    def _chat(self, prompt: str) -> str:
        req = ChatRequest(
            model=self.client.config.model,
            messages=(("user", prompt),),
            max_new_tokens=self.max_new_tokens,
        )
        return self.client.chat(req)

    def _failed(self, run: PipelineRun, error: Exception) -> PipelineRun:
        run.degraded = True
        run.output_text = ""
        run.meta["error"] = f"{type(error).__name__}: {error}"
        return run

    def run_simple(self, case: TransferCase) -> PipelineRun:
        run = PipelineRun(case.case_id, "simple", [], None, "", False)
        prompt = render_prompt(
            TEMPLATES[("simple", 1)],
            {"target_text": case.style_exemplar, "input_text": case.input_text},
        )
        try:
            response = self._chat(prompt)
        except ProviderError as exc:
            return self._failed(run, exc)
        run.step_outputs.append((prompt, response))
        run.output_text = trim_response(response)
        self._flag_suspect(run, prompt)
        return run

    def run_styll(self, case: TransferCase) -> PipelineRun:
        run = PipelineRun(case.case_id, "styll", [], None, "", False)
        step1 = render_prompt(
            TEMPLATES[("styll", 1)], {"source_text": case.input_text}
        )
        try:
            paraphrase_raw = self._chat(step1)
        except ProviderError as exc:
            return self._failed(run, exc)
        run.step_outputs.append((step1, paraphrase_raw))
        paraphrase = trim_response(paraphrase_raw)

        step2 = render_prompt(
            TEMPLATES[("styll", 2)], {"target_text": case.style_exemplar}
        )
        try:
            descriptors_raw = self._chat(step2)
        except ProviderError as exc:
            return self._failed(run, exc)
        run.step_outputs.append((step2, descriptors_raw))
        descriptors = parse_descriptors(descriptors_raw)
        run.descriptors = descriptors
        if not descriptors:
            run.degraded = True
            run.meta["error"] = "empty descriptor list"
            return run

        step3 = render_prompt(
            TEMPLATES[("styll", 3)],
            {
                "neutral_paraphrase": paraphrase,
                "style_descriptors": ", ".join(descriptors),
            },
        )
        try:
            rewrite_raw = self._chat(step3)
        except ProviderError as exc:
            return self._failed(run, exc)
        run.step_outputs.append((step3, rewrite_raw))
        run.output_text = trim_response(rewrite_raw)
        self._flag_suspect(run, step3)
        return run

    def _run_register(self, case: TransferCase, system: str) -> PipelineRun:
        run = PipelineRun(case.case_id, system, [], None, "", False)
        if system == "rg":
            step1 = render_prompt(
                TEMPLATES[("rg", 1)], {"target_text": case.style_exemplar}
            )
            step2_key = "style_analysis"
        else:
            step1 = render_prompt(
                TEMPLATES[("rg_contrastive", 1)],
                {"source_text": case.input_text, "target_text": case.style_exemplar},
            )
            step2_key = "style_comparisons"
        try:
            analysis_raw = self._chat(step1)
        except ProviderError as exc:
            return self._failed(run, exc)
        run.step_outputs.append((step1, analysis_raw))
        analysis = trim_response(analysis_raw)

        step2 = render_prompt(TEMPLATES[(system, 2)], {step2_key: analysis})
        try:
            descriptors_raw = self._chat(step2)
        except ProviderError as exc:
            return self._failed(run, exc)
        run.step_outputs.append((step2, descriptors_raw))
        descriptors = parse_descriptors(descriptors_raw)
        run.descriptors = descriptors
        if not descriptors:
            run.degraded = True
            run.meta["error"] = "empty descriptor list"
            return run

        step3 = render_prompt(
            TEMPLATES[(system, 3)],
            {
                "source_text": case.input_text,
                "style_descriptors": ", ".join(descriptors),
            },
        )
        try:
            rewrite_raw = self._chat(step3)
        except ProviderError as exc:
            return self._failed(run, exc)
        run.step_outputs.append((step3, rewrite_raw))
        run.output_text = trim_response(rewrite_raw)
        self._flag_suspect(run, step3)
        return run

    def run_rg(self, case: TransferCase) -> PipelineRun:
        return self._run_register(case, "rg")

    def run_rg_contrastive(self, case: TransferCase) -> PipelineRun:
        return self._run_register(case, "rg_contrastive")

    def run_system(self, case: TransferCase, system: str,
                   rng: SplitMix64 | None = None) -> PipelineRun:
        if system in NAIVE_SYSTEMS:
            return run_naive(case, system, rng)
        if system == "simple":
            return self.run_simple(case)
        if system == "styll":
            return self.run_styll(case)
        if system == "rg":
            return self.run_rg(case)
        if system == "rg_contrastive":
            return self.run_rg_contrastive(case)
        raise ValueError(f"unknown system {system!r}")

    @staticmethod
    def _flag_suspect(run: PipelineRun, prompt: str) -> None:
        if run.output_text and prompt in run.output_text:
            run.meta["suspect"] = True


def run_naive(case: TransferCase, system: str,
              rng: SplitMix64 | None = None) -> PipelineRun:
    """Copy, Target and Gold baselines; no chat calls involved."""
    if system == "copy":
        output = case.input_text
    elif system == "target":
        output = case.style_exemplar
    elif system == "gold":
        if not case.gold_refs:
            raise NoGoldReference(f"case {case.case_id} has no gold references")
        if len(case.gold_refs) == 1 or rng is None:
            output = case.gold_refs[0]
        else:
            output = case.gold_refs[rng.randbelow(len(case.gold_refs))]
    else:
        raise ValueError(f"unknown naive system {system!r}")
    return PipelineRun(case.case_id, system, [], None, output, False)
