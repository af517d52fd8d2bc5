"""Score container and formality threshold."""

import pytest

from styleval.errors import InvalidProbability
from styleval.scores import ScoreVector, formality_accuracy


def test_metric_names_cover_dataclass_fields():
    names = ScoreVector.metric_names()
    assert "away_biber" in names
    assert "towards_biber" in names
    assert "extras" not in names
    assert len(names) == len(set(names))


def test_as_dict_round_trip():
    vector = ScoreVector(away_biber=0.25, towards_biber=0.75, meteor=0.5)
    data = vector.as_dict()
    assert data["away_biber"] == 0.25
    assert data["meteor"] == 0.5
    assert data["mis"] is None
    assert "extras" not in data
    rebuilt = ScoreVector(**data)
    assert rebuilt == vector


def test_formality_accuracy_threshold_is_formal_inclusive():
    assert formality_accuracy(0.5, "formal") is True
    assert formality_accuracy(0.5, "informal") is False
    assert formality_accuracy(0.51, "formal") is True
    assert formality_accuracy(0.49, "formal") is False
    assert formality_accuracy(0.49, "informal") is True
    assert formality_accuracy(0.0, "informal") is True
    assert formality_accuracy(1.0, "formal") is True


def test_formality_accuracy_validates_inputs():
    with pytest.raises(InvalidProbability):
        formality_accuracy(1.5, "formal")
    with pytest.raises(InvalidProbability):
        formality_accuracy(-0.1, "informal")
    with pytest.raises(ValueError):
        formality_accuracy(0.5, "fancy")
