"""Distances and the adaptive-radius neighborhood around a focal image.

The radius adapts so the neighborhood holds a target number of test-split
instances (train members are whoever falls inside); all distance scans are
exact brute force, which desk-scale collections comfortably allow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import AnalysisStore
from .errors import DimensionMismatch, UnknownInstance
from .validation import as_vector


@dataclass(frozen=True)
class Neighborhood:
    """Members of both splits within ``radius`` of the focal instance."""

    focus_index: int
    space_name: str
    radius: float
    train_members: np.ndarray  # indices sorted by ascending distance
    test_members: np.ndarray   # focus excluded


def pairwise_distance(a, b) -> float:
    """Euclidean norm of the difference; zero iff the vectors are equal."""
    a = as_vector(a, "a")
    b = as_vector(b, "b")
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatch(
            f"vector dims differ: {a.shape[0]} vs {b.shape[0]}"
        )
    diff = a - b
    return float(np.sqrt(np.sum(diff * diff)))


def _distances_from(space_vectors, query_index):
    # Same reduction as pairwise_distance so a point at exactly the radius
    # is classified identically by batch and per-pair computations.
    query = space_vectors[query_index].astype(np.float64)
    diffs = space_vectors.astype(np.float64) - query
    return np.sqrt(np.sum(diffs * diffs, axis=1))


def _sorted_by_distance(indices, dists):
    # Stable sort on distance keeps ties ordered by ascending instance index.
    order = np.argsort(dists[indices], kind="stable")
    return indices[order]


def knn(store: AnalysisStore, space_name: str, query_index: int, k: int,
        split_filter: str | None = None) -> np.ndarray:
    """Exact k nearest instances, ties broken by lower instance index.

    The query instance itself is never a neighbor.  If the filtered split
    has fewer than k members, all of them are returned.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    space = store.space(space_name)
    if not 0 <= query_index < store.n_instances:
        raise UnknownInstance(f"instance index {query_index} out of range")
    dists = _distances_from(space.vectors, query_index)
    if split_filter is None:
        candidates = np.arange(store.n_instances)
    else:
        candidates = store.split_indices(split_filter)
    candidates = candidates[candidates != query_index]
    ranked = _sorted_by_distance(candidates, dists)
    return ranked[:k]


def adaptive_neighborhood(store: AnalysisStore, space_name: str,
                          focus_index: int, target_test_count: int = 100,
                          min_count: int = 10) -> Neighborhood:
    """Grow a radius around the focus until enough test instances fall inside.

    The radius is the distance to the ``target_test_count``-th nearest test
    instance (the farthest one when fewer exist); members are every train
    and test instance within it.  If the test side still holds fewer than
    ``min_count``, the radius expands to the ``min_count``-th test neighbor.
    """
    space = store.space(space_name)
    if not 0 <= focus_index < store.n_instances:
        raise UnknownInstance(f"instance index {focus_index} out of range")
    dists = _distances_from(space.vectors, focus_index)

    test_idx = store.test_indices
    test_idx = test_idx[test_idx != focus_index]
    train_idx = store.train_indices
    if len(test_idx) == 0:
        raise UnknownInstance("no test instances besides the focus")

    ranked_test = _sorted_by_distance(test_idx, dists)

    def members_within(radius):
        train = train_idx[dists[train_idx] <= radius]
        test = test_idx[dists[test_idx] <= radius]
        return _sorted_by_distance(train, dists), _sorted_by_distance(test, dists)

    k = min(target_test_count, len(ranked_test))
    radius = float(dists[ranked_test[k - 1]])
    train_members, test_members = members_within(radius)
    if len(test_members) < min_count:
        k = min(min_count, len(ranked_test))
        radius = float(dists[ranked_test[k - 1]])
        train_members, test_members = members_within(radius)

    return Neighborhood(
        focus_index=focus_index,
        space_name=space_name,
        radius=radius,
        train_members=train_members,
        test_members=test_members,
    )
