"""Suspicion scores and the embedding-compatible baseline outlier scorers.

A ScoreTable covers every instance (both splits) so the contrastive
histograms can bin training images alongside test images.  The raw score for
the density-ratio method is -ln(r + eps): strictly decreasing in r, so
ranking by suspicion equals ranking by inverse ratio with better behavior as
r approaches zero.  Suspicion is the min-max normalization of the raw score
over the union of both splits; an all-constant input maps to suspicion 0.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .data import AnalysisStore
from .errors import (
    DimensionMismatch,
    MissingModel,
    NonPositiveRatio,
    ParseError,
    ScoreCoverageGap,
    TooFewPoints,
)
from .validation import as_matrix, as_vector, check_dim, check_fitted

RATIO_EPS = 1e-12
EULER_GAMMA = 0.5772156649

METHODS = ("density_ratio", "isolation_forest", "center_distance")


@dataclass(frozen=True)
class ScoreTable:
    """Per-instance raw score, optional ratio, and suspicion in [0,1]."""

    method: str
    space_name: str
    raw: np.ndarray
    suspicion: np.ndarray
    ratio: np.ndarray | None = None

    def __post_init__(self):
        if self.ratio is not None and len(self.ratio) != len(self.raw):
            raise ScoreCoverageGap("ratio column length differs from raw")
        if len(self.suspicion) != len(self.raw):
            raise ScoreCoverageGap("suspicion column length differs from raw")

    @property
    def n_instances(self) -> int:
        return len(self.raw)

    def covers(self, indices) -> bool:
        indices = np.asarray(indices)
        return indices.size == 0 or (
            indices.min() >= 0 and indices.max() < self.n_instances
        )


def normalize_scores(raw) -> np.ndarray:
    """Min-max map to [0,1]; a constant vector maps to all zeros."""
    x = as_vector(raw, "raw scores")
    if x.size == 0:
        raise TooFewPoints("cannot normalize an empty score vector")
    lo, hi = float(x.min()), float(x.max())
    if hi == lo:
        return np.zeros_like(x)
    return (x - lo) / (hi - lo)


def suspicion_from_ratio(ratios, space_name="dre") -> ScoreTable:
    """Build the density-ratio score table from per-instance ratios."""
    r = as_vector(ratios, "ratios")
    if np.any(r <= 0):
        raise NonPositiveRatio("density ratios must be strictly positive")
    raw = -np.log(r + RATIO_EPS)
    return ScoreTable(
        method="density_ratio",
        space_name=space_name,
        raw=raw,
        suspicion=normalize_scores(raw),
        ratio=r,
    )


# -- isolation forest ---------------------------------------------------------

def average_path_length(n) -> float:
    """c(n) = 2 H(n-1) - 2 (n-1)/n, the unsuccessful-search normalizer."""
    if n <= 1:
        return 0.0
    h = math.log(n - 1) + EULER_GAMMA
    return 2.0 * h - 2.0 * (n - 1) / n


def anomaly_score_from_path(mean_path, n) -> float:
    """s = 2^(-E[h]/c(n)); 0.5 at the average path, toward 1 for short paths."""
    return float(2.0 ** (-mean_path / average_path_length(n)))


class _Node:
    __slots__ = ("dim", "threshold", "left", "right", "size")

    def __init__(self, size, dim=-1, threshold=0.0, left=None, right=None):
        self.size = size
        self.dim = dim
        self.threshold = threshold
        self.left = left
        self.right = right

    @property
    def is_leaf(self):
        return self.left is None


def _grow_tree(points, depth, limit, rng):
    n = points.shape[0]
    if n <= 1 or depth >= limit:
        return _Node(n)
    lo = points.min(axis=0)
    hi = points.max(axis=0)
    # Only dimensions with positive width admit a valid uniform split;
    # a node of identical points becomes a leaf.
    valid = np.flatnonzero(hi > lo)
    if valid.size == 0:
        return _Node(n)
    dim = int(rng.choice(valid))
    threshold = float(rng.uniform(lo[dim], hi[dim]))
    mask = points[:, dim] < threshold
    left = points[mask]
    right = points[~mask]
    if left.shape[0] == 0 or right.shape[0] == 0:
        # A degenerate draw at the boundary isolates nothing; stop here.
        return _Node(n)
    return _Node(
        n,
        dim=dim,
        threshold=threshold,
        left=_grow_tree(left, depth + 1, limit, rng),
        right=_grow_tree(right, depth + 1, limit, rng),
    )


def _tree_paths(node, points, indices, depth, out):
    if node.is_leaf:
        out[indices] = depth + average_path_length(node.size)
        return
    mask = points[indices, node.dim] < node.threshold
    _tree_paths(node.left, points, indices[mask], depth + 1, out)
    _tree_paths(node.right, points, indices[~mask], depth + 1, out)


class IsolationForestDetector(BaseEstimator):
    """Random axis-aligned split forest; short isolation paths mark anomalies.

    Trees are grown on seeded subsamples with a uniformly random split
    dimension and a uniformly random split value inside the node's range,
    so two fits with the same seed produce identical trees.
    """

    def __init__(self, n_trees=100, subsample=256, seed=0):
        self.n_trees = n_trees
        self.subsample = subsample
        self.seed = seed

    def fit(self, X):
        points = as_matrix(X)
        n = points.shape[0]
        if n < 2:
            raise TooFewPoints("isolation forest needs at least 2 points")
        rng = np.random.default_rng(self.seed)
        sample_size = min(int(self.subsample), n)
        limit = math.ceil(math.log2(sample_size)) if sample_size > 1 else 0
        trees = []
        for _ in range(int(self.n_trees)):
            idx = rng.choice(n, size=sample_size, replace=False)
            trees.append(_grow_tree(points[idx], 0, limit, rng))
        self.trees_ = trees
        self.sample_size_ = sample_size
        self.dim_ = points.shape[1]
        return self

    def score_samples(self, X) -> np.ndarray:
        """Anomaly score in (0,1) per row; higher means more anomalous."""
        check_fitted(self, "trees_")
        points = as_matrix(X)
        check_dim(points, self.dim_)
        n = points.shape[0]
        paths = np.zeros(n)
        buf = np.zeros(n)
        all_idx = np.arange(n)
        for tree in self.trees_:
            _tree_paths(tree, points, all_idx, 0, buf)
            paths += buf
        mean_paths = paths / len(self.trees_)
        c = average_path_length(self.sample_size_)
        return np.power(2.0, -mean_paths / c)


def fit_isolation_forest(points, n_trees=100, subsample=256, seed=0):
    """Fit the forest on stacked rows (typically both splits of a space)."""
    return IsolationForestDetector(n_trees, subsample, seed).fit(points)


def iforest_score(forest: IsolationForestDetector, point) -> float:
    """Anomaly score for a single point."""
    point = as_vector(point, "point")
    return float(forest.score_samples(point.reshape(1, -1))[0])


# -- center distance ----------------------------------------------------------

class CenterDistanceDetector(BaseEstimator):
    """Euclidean distance from the arithmetic mean of the fitted points."""

    def fit(self, X):
        points = as_matrix(X)
        if points.shape[0] == 0:
            raise TooFewPoints("center distance needs at least one point")
        self.center_ = points.mean(axis=0)
        return self

    def score_samples(self, X) -> np.ndarray:
        check_fitted(self, "center_")
        points = as_matrix(X)
        check_dim(points, self.center_.shape[0])
        return np.linalg.norm(points - self.center_, axis=1)


def center_distance_score(points, point) -> float:
    """Distance from *point* to the mean of *points*."""
    detector = CenterDistanceDetector().fit(points)
    point = as_vector(point, "point")
    if point.shape[0] != detector.center_.shape[0]:
        raise DimensionMismatch(
            f"point dim {point.shape[0]} != data dim {detector.center_.shape[0]}"
        )
    return float(detector.score_samples(point.reshape(1, -1))[0])


# -- dataset-level scoring ----------------------------------------------------

def score_dataset(store: AnalysisStore, method: str, space_name: str,
                  model=None, n_trees=100, subsample=256, seed=0) -> ScoreTable:
    """Score every instance of the store (both splits) with one method.

    density_ratio needs a fitted ratio model whose input space is
    *space_name*; isolation_forest fits on all rows of the space;
    center_distance measures distance to the train-split mean.
    """
    store.require_both_splits()
    space = store.space(space_name)
    vectors = space.vectors.astype(np.float64)

    if method == "density_ratio":
        if model is None:
            raise MissingModel("density_ratio scoring requires a trained model")
        ratios = model.predict_ratio(vectors)
        return suspicion_from_ratio(ratios, space_name=space_name)
    if method == "isolation_forest":
        forest = fit_isolation_forest(vectors, n_trees, subsample, seed)
        raw = forest.score_samples(vectors)
    elif method == "center_distance":
        detector = CenterDistanceDetector().fit(vectors[store.train_indices])
        raw = detector.score_samples(vectors)
    else:
        raise ValueError(f"unknown scoring method {method!r}")
    return ScoreTable(
        method=method,
        space_name=space_name,
        raw=raw,
        suspicion=normalize_scores(raw),
    )


# -- persistence --------------------------------------------------------------

SCORES_HEADER = ["id", "split", "method", "space", "raw", "ratio", "suspicion"]


def write_scores(path, tables, store: AnalysisStore) -> None:
    """Write score tables as CSV, one row per instance per (method, space).

    Groups are ordered by (method, space) and rows by instance index, so a
    rewrite with identical inputs is byte-identical.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(SCORES_HEADER)
        for table in sorted(tables, key=lambda t: (t.method, t.space_name)):
            if table.n_instances != store.n_instances:
                raise ScoreCoverageGap(
                    f"table {table.method}/{table.space_name} covers "
                    f"{table.n_instances} of {store.n_instances} instances"
                )
            for i, rec in enumerate(store.instances):
                ratio = "" if table.ratio is None else repr(float(table.ratio[i]))
                writer.writerow([
                    rec.id, rec.split, table.method, table.space_name,
                    repr(float(table.raw[i])), ratio,
                    repr(float(table.suspicion[i])),
                ])


def read_scores(path, store: AnalysisStore) -> list[ScoreTable]:
    """Read score tables back, grouped by (method, space)."""
    groups: dict[tuple, dict] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != SCORES_HEADER:
            raise ParseError(f"{path}: unexpected scores header {header}")
        for row in reader:
            if len(row) != len(SCORES_HEADER):
                raise ParseError(f"{path}: malformed row {row}")
            iid, _split, method, space, raw, ratio, suspicion = row
            key = (method, space)
            group = groups.setdefault(key, {
                "raw": np.full(store.n_instances, np.nan),
                "ratio": np.full(store.n_instances, np.nan),
                "suspicion": np.full(store.n_instances, np.nan),
                "has_ratio": False,
            })
            idx = store.index_of(iid)
            group["raw"][idx] = float(raw)
            group["suspicion"][idx] = float(suspicion)
            if ratio != "":
                group["ratio"][idx] = float(ratio)
                group["has_ratio"] = True
    tables = []
    for (method, space), group in groups.items():
        if np.any(np.isnan(group["raw"])):
            raise ScoreCoverageGap(
                f"{path}: {method}/{space} does not cover every instance"
            )
        tables.append(ScoreTable(
            method=method,
            space_name=space,
            raw=group["raw"],
            suspicion=group["suspicion"],
            ratio=group["ratio"] if group["has_ratio"] else None,
        ))
    return tables
