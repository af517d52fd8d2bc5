"""Multidimensional register-analysis model: fit, project, persist.

Fits a PCA on the feature correlation matrix of a training corpus using a
deterministic cyclic Jacobi eigensolver, retains a configurable number of
dimensions, and projects new feature vectors into that space. Model files
round-trip bit-exactly.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import CatalogMismatch, DegenerateCorpus, InsufficientCorpus, IoFailure
from .features import FeatureVector

MODEL_FORMAT = "mda-model.v1"


@dataclass(frozen=True)
class MdaFitConfig:
    dimensions: int = 6
    variance_threshold: float | None = None
    varimax: bool = False


@dataclass(frozen=True)
class MdaEmbedding:
    scores: tuple[float, ...]


@dataclass(frozen=True)
class MdaModel:
    catalog_version: str
    feature_names: tuple[str, ...]       # retained features, catalog order
    retained_indices: tuple[int, ...]    # positions in the full catalog
    dropped: tuple[str, ...]             # zero-variance feature names
    mean: tuple[float, ...]
    std: tuple[float, ...]
    loadings: tuple[tuple[float, ...], ...]  # retained features x D
    eigenvalues: tuple[float, ...]
    explained_variance: tuple[float, ...]    # fraction of total, per dimension
    rotated: bool = False
    extras: dict = field(default_factory=dict, compare=False)

    @property
    def d(self) -> int:
        return len(self.eigenvalues)


def jacobi_eigh(matrix: np.ndarray, tol: float = 1e-10, max_sweeps: int = 100):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues, eigenvectors) sorted by descending eigenvalue
    with a stable tie order; eigenvectors are the columns.
    """
    a = np.array(matrix, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    if n == 1:
        return a.diagonal().copy(), v
    for _ in range(max_sweeps):
        off = math.sqrt(max(0.0, (a * a).sum() - (a.diagonal() ** 2).sum()))
        if off < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:  # theta**2 would overflow
                    t = 1.0 / (2.0 * theta)
                elif theta >= 0.0:
                    t = 1.0 / (theta + math.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                app, aqq = a[p, p], a[q, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = a[q, p] = 0.0
                mask = np.ones(n, dtype=bool)
                mask[[p, q]] = False
                aip = a[mask, p].copy()
                aiq = a[mask, q].copy()
                a[mask, p] = c * aip - s * aiq
                a[mask, q] = s * aip + c * aiq
                a[p, mask] = a[mask, p]
                a[q, mask] = a[mask, q]
                vip = v[:, p].copy()
                viq = v[:, q].copy()
                v[:, p] = c * vip - s * viq
                v[:, q] = s * vip + c * viq
    eigenvalues = a.diagonal().copy()
    order = np.argsort(-eigenvalues, kind="stable")
    return eigenvalues[order], v[:, order]


def varimax_rotate(loadings: np.ndarray, max_iter: int = 100, tol: float = 1e-8) -> np.ndarray:
    """Varimax rotation of a loading matrix (orthogonal, gamma = 1)."""
    p, k = loadings.shape
    if k < 2:
        return loadings.copy()
    rotation = np.eye(k)
    objective = 0.0
    for _ in range(max_iter):
        rotated = loadings @ rotation
        gradient = loadings.T @ (
            rotated ** 3 - rotated @ np.diag(np.diag(rotated.T @ rotated)) / p
        )
        u, singulars, vt = np.linalg.svd(gradient)
        rotation = u @ vt
        new_objective = singulars.sum()
        if new_objective <= objective * (1.0 + tol):
            break
        objective = new_objective
    return loadings @ rotation


def _fix_signs(loadings: np.ndarray) -> np.ndarray:
    out = loadings.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        pivot = int(np.argmax(np.abs(col)))
        if col[pivot] < 0:
            out[:, j] = -col
    return out


def fit_mda(
    corpus: list[FeatureVector],
    feature_names: list[str],
    config: MdaFitConfig = MdaFitConfig(),
) -> MdaModel:
    """Fit the register-analysis model on a corpus of feature vectors.

    Standardizes per feature, drops zero-variance features, factors the
    correlation matrix, and retains dimensions per the config.
    """
    if len(corpus) < 2:
        raise InsufficientCorpus(f"need at least 2 vectors, got {len(corpus)}")
    version = corpus[0].catalog_version
    for fv in corpus:
        if fv.catalog_version != version:
            raise CatalogMismatch(
                f"corpus mixes catalog versions {version!r} and {fv.catalog_version!r}"
            )
    x = np.array([fv.rates for fv in corpus], dtype=float)
    if x.shape[1] != len(feature_names):
        raise CatalogMismatch(
            f"vectors have {x.shape[1]} features, catalog lists {len(feature_names)}"
        )
    mean = x.mean(axis=0)
    std = x.std(axis=0, ddof=1)
    retained = [i for i in range(x.shape[1]) if std[i] > 0.0]
    dropped = [feature_names[i] for i in range(x.shape[1]) if std[i] == 0.0]
    if not retained:
        raise DegenerateCorpus("every feature has zero variance")

    z = (x[:, retained] - mean[retained]) / std[retained]
    corr = z.T @ z / (len(corpus) - 1)
    eigenvalues, eigenvectors = jacobi_eigh(corr)

    total = float(np.clip(eigenvalues, 0.0, None).sum())
    fractions = np.clip(eigenvalues, 0.0, None) / total if total > 0 else eigenvalues * 0.0

    if config.variance_threshold is not None:
        cumulative = np.cumsum(fractions)
        d = int(np.searchsorted(cumulative, config.variance_threshold - 1e-12) + 1)
        d = min(d, len(retained))
    else:
        d = min(config.dimensions, len(retained))

    loadings = eigenvectors[:, :d]
    if config.varimax:
        loadings = varimax_rotate(loadings)
    loadings = _fix_signs(loadings)

    return MdaModel(
        catalog_version=version,
        feature_names=tuple(feature_names[i] for i in retained),
        retained_indices=tuple(retained),
        dropped=tuple(dropped),
        mean=tuple(float(v) for v in mean[retained]),
        std=tuple(float(v) for v in std[retained]),
        loadings=tuple(tuple(float(v) for v in row) for row in loadings),
        eigenvalues=tuple(float(v) for v in eigenvalues[:d]),
        explained_variance=tuple(float(v) for v in fractions[:d]),
        rotated=config.varimax,
    )


def project(model: MdaModel, fv: FeatureVector) -> MdaEmbedding:
    """Project a feature vector into the fitted space."""
    if fv.catalog_version != model.catalog_version:
        raise CatalogMismatch(
            f"vector from catalog {fv.catalog_version!r}, model fitted on "
            f"{model.catalog_version!r}"
        )
    rates = np.array(fv.rates, dtype=float)[list(model.retained_indices)]
    z = (rates - np.array(model.mean)) / np.array(model.std)
    scores = np.array(model.loadings).T @ z
    return MdaEmbedding(tuple(float(v) for v in scores))


def save_model(model: MdaModel, path: str) -> None:
    """Write the model as JSON; real values round-trip bit-exactly."""
    payload = {
        "format": MODEL_FORMAT,
        "catalog_version": model.catalog_version,
        "feature_names": list(model.feature_names),
        "retained_indices": list(model.retained_indices),
        "dropped": list(model.dropped),
        "mean": list(model.mean),
        "std": list(model.std),
        "loadings": [list(row) for row in model.loadings],
        "eigenvalues": list(model.eigenvalues),
        "explained_variance": list(model.explained_variance),
        "rotated": model.rotated,
    }
    tmp = path + ".tmp"
    try:
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1)
            fh.write("\n")
        os.replace(tmp, path)
    except OSError as exc:
        raise IoFailure(f"cannot write model file {path}: {exc}") from exc


def load_model(path: str) -> MdaModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise IoFailure(f"cannot read model file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise IoFailure(f"model file {path} is not valid JSON: {exc}") from exc
    if payload.get("format") != MODEL_FORMAT:
        raise IoFailure(
            f"model file {path} has format {payload.get('format')!r}, "
            f"expected {MODEL_FORMAT!r}"
        )
    return MdaModel(
        catalog_version=payload["catalog_version"],
        feature_names=tuple(payload["feature_names"]),
        retained_indices=tuple(payload["retained_indices"]),
        dropped=tuple(payload["dropped"]),
        mean=tuple(payload["mean"]),
        std=tuple(payload["std"]),
        loadings=tuple(tuple(row) for row in payload["loadings"]),
        eigenvalues=tuple(payload["eigenvalues"]),
        explained_variance=tuple(payload["explained_variance"]),
        rotated=payload["rotated"],
    )
