"""Per-case score container and scalar score helpers."""

from __future__ import annotations

from dataclasses import dataclass, field, fields

from .errors import InvalidProbability


@dataclass
class ScoreVector:
    """All metric columns for one pipeline run on one case.

    Away/Towards in the register-analysis space are always present; every
    other field is optional and stays None when its scorer is unavailable
    or the metric does not apply to the task.
    """

    away_biber: float
    towards_biber: float
    away_stylecav: float | None = None
    towards_stylecav: float | None = None
    away_luar: float | None = None
    towards_luar: float | None = None
    mis: float | None = None
    sbert_sim: float | None = None
    meteor: float | None = None
    cola: float | None = None
    formality_prob: float | None = None
    fkgl: float | None = None
    ari: float | None = None
    rouge1: float | None = None
    rouge2: float | None = None
    rougeL: float | None = None
    bleu: float | None = None
    sari: float | None = None
    overlap_rouge1: float = 0.0
    overlap_rouge2: float = 0.0
    overlap_rougeL: float = 0.0
    extras: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {}
        for f in fields(self):
            if f.name == "extras":
                continue
            out[f.name] = getattr(self, f.name)
        return out

    @classmethod
    def metric_names(cls) -> list[str]:
        return [f.name for f in fields(cls) if f.name != "extras"]


def formality_accuracy(prob: float, desired: str) -> bool:
    """Whether a formality probability lands on the desired side of 0.5.

    The threshold itself counts as formal.
    """
    if not 0.0 <= prob <= 1.0:
        raise InvalidProbability(f"formality probability {prob} outside [0, 1]")
    if desired not in ("formal", "informal"):
        raise ValueError(f"desired formality must be formal or informal, got {desired!r}")
    if desired == "formal":
        return prob >= 0.5
    return prob < 0.5
