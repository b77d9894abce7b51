"""2D overview of the test split: deterministic PCA baseline plus CSV import.

The scatter view only needs a stable overview, so the projector interface is
pluggable: fit the built-in power-iteration PCA, or import coordinates
computed by an external neighbor-embedding tool.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .data import AnalysisStore
from .errors import (
    CoverageGap,
    DegenerateVariance,
    ParseError,
    TooFewPoints,
)
from .validation import as_matrix, check_dim, check_fitted

_POWER_TOL = 1e-10
_POWER_MAX_ITER = 1000


@dataclass(frozen=True)
class ProjectionTable:
    """2D coordinates for the test split, in test manifest order."""

    ids: tuple
    coords: np.ndarray  # (n_test, 2) float64


def _power_iterate(C, rng):
    """Leading eigenpair of the PSD matrix C by power iteration."""
    dim = C.shape[0]
    v = rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    for _ in range(_POWER_MAX_ITER):
        w = C @ v
        norm = np.linalg.norm(w)
        if norm < 1e-30:
            # No variance left in this subspace; keep the current direction.
            return v, 0.0
        w /= norm
        if np.linalg.norm(w - v) < _POWER_TOL:
            v = w
            break
        v = w
    eigenvalue = float(v @ C @ v)
    return v, eigenvalue


def _fix_sign(component):
    pivot = int(np.argmax(np.abs(component)))
    return component if component[pivot] > 0 else -component


class PowerIterationPCA(BaseEstimator):
    """Top-2 principal components via power iteration with deflation.

    Deterministic: the start vector comes from a fixed generator, and each
    component's largest-magnitude coordinate is flipped positive.
    """

    def __init__(self, n_components=2):
        self.n_components = n_components

    def fit(self, X):
        points = as_matrix(X)
        n, dim = points.shape
        if n < 3:
            raise TooFewPoints("PCA needs at least 3 points")
        if dim < 2:
            raise TooFewPoints("PCA needs at least 2 dimensions")
        mean = points.mean(axis=0)
        centered = points - mean
        if not np.any(np.abs(centered) > 0):
            raise DegenerateVariance("all points are identical")
        C = centered.T @ centered / (n - 1)

        rng = np.random.default_rng(0)
        components = []
        variances = []
        for _ in range(int(self.n_components)):
            v, lam = _power_iterate(C, rng)
            # Re-orthogonalize against previous components; deflation can
            # leave a tiny residual along them.
            for prev in components:
                v = v - (v @ prev) * prev
            norm = np.linalg.norm(v)
            if norm < 1e-12:
                # Deflated space is empty; complete with any orthogonal axis.
                v = _orthogonal_completion(components, dim)
                lam = 0.0
            else:
                v = v / norm
            v = _fix_sign(v)
            components.append(v)
            variances.append(max(lam, 0.0))
            C = C - lam * np.outer(v, v)

        self.mean_ = mean
        self.components_ = np.vstack(components)
        self.explained_variance_ = np.array(variances)
        return self

    def transform(self, X):
        check_fitted(self, "components_")
        points = as_matrix(X)
        check_dim(points, self.mean_.shape[0])
        return (points - self.mean_) @ self.components_.T


def _orthogonal_completion(components, dim):
    for k in range(dim):
        v = np.zeros(dim)
        v[k] = 1.0
        for prev in components:
            v = v - (v @ prev) * prev
        norm = np.linalg.norm(v)
        if norm > 1e-6:
            return v / norm
    raise DegenerateVariance("cannot complete an orthonormal pair")


def fit_pca2(points) -> PowerIterationPCA:
    """Fit the two-component projector on rows of *points*."""
    return PowerIterationPCA(n_components=2).fit(points)


def project2(projector: PowerIterationPCA, points) -> np.ndarray:
    """2D coordinates per row: (point - mean) dotted with the components."""
    return projector.transform(points)


def project_store(store: AnalysisStore, space_name: str) -> ProjectionTable:
    """Project the store's test split with the PCA baseline."""
    space = store.space(space_name)
    test_idx = store.test_indices
    rows = space.vectors[test_idx].astype(np.float64)
    projector = fit_pca2(rows)
    coords = projector.transform(rows)
    ids = tuple(store.instances[i].id for i in test_idx)
    return ProjectionTable(ids=ids, coords=coords)


# -- persistence --------------------------------------------------------------

def write_projection(path, table: ProjectionTable) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "x", "y"])
        for iid, (x, y) in zip(table.ids, table.coords):
            writer.writerow([iid, repr(float(x)), repr(float(y))])


def load_external_projection(path, store: AnalysisStore) -> ProjectionTable:
    """Import ``id,x,y`` coordinates; must cover the test split exactly."""
    rows = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["id", "x", "y"]:
            raise ParseError(f"{path}: unexpected projection header {header}")
        for row in reader:
            if len(row) != 3:
                raise ParseError(f"{path}: malformed row {row}")
            try:
                rows[row[0]] = (float(row[1]), float(row[2]))
            except ValueError as exc:
                raise ParseError(f"{path}: non-numeric coordinate in {row}") from exc

    test_ids = [store.instances[i].id for i in store.test_indices]
    missing = [iid for iid in test_ids if iid not in rows]
    extra = sorted(set(rows) - set(test_ids))
    if missing or extra:
        raise CoverageGap(
            f"{path}: projection must cover the test split exactly "
            f"(missing {len(missing)}, unknown {len(extra)})"
        )
    coords = np.array([rows[iid] for iid in test_ids], dtype=np.float64)
    return ProjectionTable(ids=tuple(test_ids), coords=coords)
