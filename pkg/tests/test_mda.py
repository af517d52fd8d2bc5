"""Register-analysis model: eigensolver, fitting, persistence, separation."""

import json

import numpy as np
import pytest

from styleval.errors import CatalogMismatch, DegenerateCorpus, InsufficientCorpus
from styleval.features import FeatureVector, extract_features
from styleval.mda import (
    MdaFitConfig,
    fit_mda,
    jacobi_eigh,
    load_model,
    project,
    save_model,
    varimax_rotate,
)
from styleval.rng import SplitMix64
from styleval.textproc import Document

from conftest import synthetic_register_texts


def _random_symmetric(rng, n, scale=1.0):
    m = np.array([[rng.next_u64() / 2**63 - 1.0 for _ in range(n)] for _ in range(n)])
    return scale * (m + m.T) / 2.0


# --- eigensolver -------------------------------------------------------------

def test_jacobi_matches_lapack_eigenvalues():
    rng = SplitMix64(321)
    for trial in range(30):
        n = 2 + trial % 11
        a = _random_symmetric(rng, n, scale=3.0)
        values, vectors = jacobi_eigh(a)
        reference = np.sort(np.linalg.eigvalsh(a))[::-1]
        assert np.allclose(values, reference, atol=1e-8), f"trial {trial}"
        # eigenpairs satisfy A v = lambda v
        for j in range(n):
            residual = a @ vectors[:, j] - values[j] * vectors[:, j]
            assert np.max(np.abs(residual)) < 1e-7


def test_jacobi_eigenvectors_orthonormal():
    rng = SplitMix64(654)
    a = _random_symmetric(rng, 8)
    _, vectors = jacobi_eigh(a)
    assert np.allclose(vectors.T @ vectors, np.eye(8), atol=1e-9)


def test_jacobi_diagonal_matrix():
    a = np.diag([5.0, 1.0, 3.0])
    values, _ = jacobi_eigh(a)
    assert np.allclose(values, [5.0, 3.0, 1.0])


def test_jacobi_handles_tiny_and_huge_entries():
    a = np.array([[1e-200, 1e-210], [1e-210, 2e-200]])
    values, _ = jacobi_eigh(a)
    assert np.all(np.isfinite(values))
    b = np.array([[1e150, 1.0], [1.0, -1e150]])
    values_b, _ = jacobi_eigh(b)
    assert np.all(np.isfinite(values_b))


def test_varimax_preserves_orthonormal_columns():
    rng = SplitMix64(777)
    a = _random_symmetric(rng, 9)
    _, vectors = jacobi_eigh(a)
    rotated = varimax_rotate(vectors[:, :4])
    assert np.allclose(rotated.T @ rotated, np.eye(4), atol=1e-8)


# --- fitting on synthetic numeric corpora ------------------------------------

def _block_corpus(n=60, seed=1234):
    """Five features in two independent correlated blocks."""
    rng = SplitMix64(seed)

    def u():
        return rng.next_u64() / 2**64

    rows = []
    for _ in range(n):
        u1, u2, u3, u4, u5 = u(), u(), u(), u(), u()
        rows.append((
            10.0 * u1,
            8.0 * u1 + 2.0 * u2,
            10.0 * u3,
            7.0 * u3 + 3.0 * u4,
            5.0 * u3 + 5.0 * u5,
        ))
    return rows


def _vectors(rows, version="synthetic.v1"):
    return [FeatureVector(version, tuple(r), 100) for r in rows]


def _brute_force_fit(rows, d):
    """Reference fit with numpy only: standardize, correlate, eigh."""
    x = np.array(rows, dtype=float)
    mean = x.mean(axis=0)
    std = x.std(axis=0, ddof=1)
    z = (x - mean) / std
    corr = z.T @ z / (len(rows) - 1)
    values, vectors = np.linalg.eigh(corr)
    order = np.argsort(values)[::-1]
    values = values[order]
    vectors = vectors[:, order]
    for j in range(vectors.shape[1]):
        pivot = int(np.argmax(np.abs(vectors[:, j])))
        if vectors[pivot, j] < 0:
            vectors[:, j] = -vectors[:, j]
    return mean, std, values[:d], vectors[:, :d]


def test_fit_matches_brute_force_on_block_corpus():
    rows = _block_corpus()
    names = [f"f{i}" for i in range(5)]
    model = fit_mda(_vectors(rows), names, MdaFitConfig(dimensions=3))
    mean, std, values, vectors = _brute_force_fit(rows, 3)

    assert np.allclose(model.mean, mean, atol=1e-8)
    assert np.allclose(model.std, std, atol=1e-8)
    assert np.allclose(model.eigenvalues[:3], values, atol=1e-8)
    assert np.allclose(np.array(model.loadings), vectors, atol=1e-8)


def test_fit_projection_matches_brute_force():
    rows = _block_corpus()
    names = [f"f{i}" for i in range(5)]
    model = fit_mda(_vectors(rows), names, MdaFitConfig(dimensions=2))
    mean, std, _, vectors = _brute_force_fit(rows, 2)
    for row in rows[:10]:
        got = project(model, FeatureVector("synthetic.v1", tuple(row), 100)).scores
        expected = vectors.T @ ((np.array(row) - mean) / std)
        assert np.allclose(got, expected, atol=1e-8)


def test_training_score_variance_equals_eigenvalues():
    rows = _block_corpus(n=80, seed=555)
    names = [f"f{i}" for i in range(5)]
    model = fit_mda(_vectors(rows), names, MdaFitConfig(dimensions=4))
    scores = np.array([
        project(model, FeatureVector("synthetic.v1", tuple(r), 100)).scores
        for r in rows
    ])
    variances = scores.var(axis=0, ddof=1)
    assert np.allclose(variances, model.eigenvalues[:4], atol=1e-6)


def test_eigenvalues_descending_and_fractions_valid():
    rows = _block_corpus()
    model = fit_mda(_vectors(rows), [f"f{i}" for i in range(5)],
                    MdaFitConfig(dimensions=5))
    values = list(model.eigenvalues)
    assert values == sorted(values, reverse=True)
    assert all(f >= 0.0 for f in model.explained_variance)
    assert sum(model.explained_variance) <= 1.0 + 1e-9


def test_variance_threshold_retention():
    rows = _block_corpus()
    names = [f"f{i}" for i in range(5)]
    full = fit_mda(_vectors(rows), names, MdaFitConfig(dimensions=5))
    cumulative = np.cumsum(full.explained_variance)
    target = float(cumulative[1])  # exactly two dimensions' worth
    model = fit_mda(
        _vectors(rows), names,
        MdaFitConfig(dimensions=5, variance_threshold=target),
    )
    assert model.d == 2


def test_zero_variance_features_dropped():
    rows = [(1.0, float(i), 5.0, float(i * i % 7)) for i in range(30)]
    names = ["const_a", "x", "const_b", "y"]
    model = fit_mda(_vectors(rows), names, MdaFitConfig(dimensions=2))
    assert set(model.dropped) == {"const_a", "const_b"}
    assert model.feature_names == ("x", "y")
    assert model.retained_indices == (1, 3)


def test_degenerate_corpus_raises():
    rows = [(1.0, 2.0), (1.0, 2.0), (1.0, 2.0)]
    with pytest.raises(DegenerateCorpus):
        fit_mda(_vectors(rows), ["a", "b"], MdaFitConfig(dimensions=1))


def test_insufficient_corpus_raises():
    with pytest.raises(InsufficientCorpus):
        fit_mda(_vectors([(1.0, 2.0)]), ["a", "b"])


def test_catalog_version_mismatch_raises():
    rows = _block_corpus()
    model = fit_mda(_vectors(rows), [f"f{i}" for i in range(5)],
                    MdaFitConfig(dimensions=2))
    with pytest.raises(CatalogMismatch):
        project(model, FeatureVector("other.v1", tuple(rows[0]), 100))
    with pytest.raises(CatalogMismatch):
        fit_mda(
            _vectors(rows) + _vectors([rows[0]], version="other.v1"),
            [f"f{i}" for i in range(5)],
        )


def test_sign_convention_largest_loading_positive():
    rows = _block_corpus()
    model = fit_mda(_vectors(rows), [f"f{i}" for i in range(5)],
                    MdaFitConfig(dimensions=3))
    loadings = np.array(model.loadings)
    for j in range(loadings.shape[1]):
        pivot = int(np.argmax(np.abs(loadings[:, j])))
        assert loadings[pivot, j] > 0


def test_varimax_fit_still_reproduces_variances():
    rows = _block_corpus(n=70, seed=888)
    names = [f"f{i}" for i in range(5)]
    model = fit_mda(_vectors(rows), names,
                    MdaFitConfig(dimensions=3, varimax=True))
    assert model.rotated
    scores = np.array([
        project(model, FeatureVector("synthetic.v1", tuple(r), 100)).scores
        for r in rows
    ])
    # rotation redistributes variance but preserves the total
    assert np.sum(scores.var(axis=0, ddof=1)) == pytest.approx(
        float(np.sum(model.eigenvalues[:3])), abs=1e-6
    )


# --- persistence -------------------------------------------------------------

def test_save_load_round_trip_bit_exact(tmp_path):
    rows = _block_corpus()
    model = fit_mda(_vectors(rows), [f"f{i}" for i in range(5)],
                    MdaFitConfig(dimensions=3))
    path = tmp_path / "model.json"
    save_model(model, str(path))
    loaded = load_model(str(path))
    assert loaded == model  # dataclass equality covers every float bit-exactly
    row = rows[0]
    original = project(model, FeatureVector("synthetic.v1", tuple(row), 100)).scores
    reloaded = project(loaded, FeatureVector("synthetic.v1", tuple(row), 100)).scores
    assert original == reloaded


def test_save_twice_identical_bytes(tmp_path):
    rows = _block_corpus()
    model = fit_mda(_vectors(rows), [f"f{i}" for i in range(5)],
                    MdaFitConfig(dimensions=2))
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    save_model(model, str(p1))
    save_model(model, str(p2))
    assert p1.read_bytes() == p2.read_bytes()


def test_load_rejects_wrong_format(tmp_path):
    from styleval.errors import IoFailure

    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"format": "something-else"}), encoding="utf-8")
    with pytest.raises(IoFailure):
        load_model(str(path))


# --- separation on text corpora ----------------------------------------------

def test_two_register_corpus_separates_on_leading_dimension(catalog):
    involved, informational = synthetic_register_texts(200, seed=99)
    corpus = [
        extract_features(Document.analyze(t), catalog)
        for t in involved + informational
    ]
    model = fit_mda(corpus, catalog.names(), MdaFitConfig(dimensions=6))
    scores = [project(model, fv).scores[0] for fv in corpus]
    a = np.array(scores[:200])
    b = np.array(scores[200:])
    midpoint = (a.mean() + b.mean()) / 2.0
    if a.mean() < b.mean():
        correct = np.sum(a < midpoint) + np.sum(b >= midpoint)
    else:
        correct = np.sum(a >= midpoint) + np.sum(b < midpoint)
    assert correct / 400.0 >= 0.9

    all_scores = np.array([project(model, fv).scores for fv in corpus])
    assert np.allclose(
        all_scores.var(axis=0, ddof=1), model.eigenvalues[:6], atol=1e-6
    )
