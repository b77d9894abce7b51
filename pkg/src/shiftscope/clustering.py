"""Agglomerative (Ward) clustering of the test split and cluster ranking.

The merge loop is a deterministic greedy: at each step the pair of clusters
with the minimal increase in within-cluster variance is merged, costs updated
through the Lance-Williams recurrence.  Ties pick the lexicographically
smallest slot pair, and a cluster's slot equals its smallest member index,
which makes the tie rule independent of input presentation order.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator

from .data import AnalysisStore
from .errors import (
    ParseError,
    ScoreCoverageGap,
    TooFewPoints,
    UnknownCluster,
)
from .scoring import ScoreTable
from .validation import as_matrix


@dataclass(frozen=True)
class ClusterAssignment:
    """Cluster label per test instance plus per-cluster centroids.

    Labels are canonical: clusters are numbered by their smallest member's
    position within the test split, so the same partition always gets the
    same ids regardless of merge order.
    """

    space_name: str
    n_clusters: int
    labels: np.ndarray      # int label per test-split position
    centroids: np.ndarray   # (n_clusters, dim) member means

    def members_of(self, cluster_id: int) -> np.ndarray:
        if not 0 <= cluster_id < self.n_clusters:
            raise UnknownCluster(f"cluster {cluster_id} does not exist")
        return np.flatnonzero(self.labels == cluster_id)


@dataclass(frozen=True)
class ClusterSummary:
    cluster_id: int
    size: int
    mean_suspicion: float
    representative_indices: np.ndarray  # test positions, descending suspicion


class WardAgglomerative(BaseEstimator):
    """Bottom-up Ward clustering with a fixed index-based tie rule."""

    def __init__(self, n_clusters=100):
        self.n_clusters = n_clusters

    def fit_predict(self, X) -> np.ndarray:
        points = as_matrix(X)
        n = points.shape[0]
        k = int(self.n_clusters)
        if n < k:
            raise TooFewPoints(f"{n} points cannot form {k} clusters")

        # cost[i, j] = increase in total within-cluster variance if the
        # clusters in slots i and j merge; inf marks dead or diagonal slots.
        sq = np.einsum("ij,ij->i", points, points)
        cost = sq[:, None] + sq[None, :] - 2.0 * points @ points.T
        np.maximum(cost, 0.0, out=cost)
        cost *= 0.5
        np.fill_diagonal(cost, np.inf)
        sizes = np.ones(n)
        alive = np.ones(n, dtype=bool)
        members = [[i] for i in range(n)]

        for _ in range(n - k):
            # Row-major argmin returns the lexicographically smallest (i, j)
            # among tied minima; slot index == smallest member index.
            flat = np.argmin(cost)
            i, j = divmod(int(flat), n)
            if i > j:
                i, j = j, i
            ni, nj = sizes[i], sizes[j]
            d_ij = cost[i, j]
            others = alive.copy()
            others[i] = others[j] = False
            nk = sizes[others]
            total = ni + nj + nk
            merged_cost = (
                (ni + nk) * cost[i, others]
                + (nj + nk) * cost[j, others]
                - nk * d_ij
            ) / total
            cost[i, others] = merged_cost
            cost[others, i] = merged_cost
            cost[j, :] = np.inf
            cost[:, j] = np.inf
            sizes[i] = ni + nj
            alive[j] = False
            members[i].extend(members[j])
            members[j] = []

        labels = np.empty(n, dtype=np.intp)
        slots = sorted(np.flatnonzero(alive), key=lambda s: min(members[s]))
        for label, slot in enumerate(slots):
            labels[members[slot]] = label
        self.labels_ = labels
        self.centroids_ = np.vstack([
            points[labels == label].mean(axis=0) for label in range(k)
        ])
        return labels


def ward_cluster(points, n_clusters=100, space_name="") -> ClusterAssignment:
    """Cluster rows of *points* into ``n_clusters`` groups."""
    clusterer = WardAgglomerative(n_clusters=n_clusters)
    labels = clusterer.fit_predict(points)
    return ClusterAssignment(
        space_name=space_name,
        n_clusters=int(n_clusters),
        labels=labels,
        centroids=clusterer.centroids_,
    )


def cluster_store(store: AnalysisStore, space_name: str,
                  n_clusters=100) -> ClusterAssignment:
    """Cluster the store's test split in the named space."""
    space = store.space(space_name)
    test_rows = space.vectors[store.test_indices].astype(np.float64)
    return ward_cluster(test_rows, n_clusters, space_name=space_name)


def _test_suspicion(store: AnalysisStore, scores: ScoreTable) -> np.ndarray:
    test_idx = store.test_indices
    if not scores.covers(test_idx):
        raise ScoreCoverageGap("score table does not cover the test split")
    return scores.suspicion[test_idx]


def rank_clusters(store: AnalysisStore, assignment: ClusterAssignment,
                  scores: ScoreTable, top_k=10,
                  n_representatives=9) -> list[ClusterSummary]:
    """Top clusters by mean suspicion, each with its top outlier members.

    Ties in mean suspicion order by ascending cluster id; representatives
    are the highest-suspicion members, descending.
    """
    susp = _test_suspicion(store, scores)
    summaries = []
    for cid in range(assignment.n_clusters):
        members = assignment.members_of(cid)
        member_susp = susp[members]
        # argsort on negated suspicion, stable: ties keep ascending index
        order = np.argsort(-member_susp, kind="stable")
        reps = members[order[:n_representatives]]
        summaries.append(ClusterSummary(
            cluster_id=cid,
            size=len(members),
            mean_suspicion=float(member_susp.mean()),
            representative_indices=reps,
        ))
    summaries.sort(key=lambda s: (-s.mean_suspicion, s.cluster_id))
    return summaries[:top_k]


def cluster_contrast_set(store: AnalysisStore, assignment: ClusterAssignment,
                         cluster_id: int, scores: ScoreTable, cap=50):
    """Contrast set for one cluster: top test members vs. centroid-near train.

    Returns ``(test_subset, train_subset)`` as instance indices (manifest
    positions), equal in size, each sorted by descending suspicion for
    display.
    """
    members = assignment.members_of(cluster_id)
    test_idx = store.test_indices
    train_idx = store.train_indices
    susp = scores.suspicion
    if scores.n_instances != store.n_instances:
        raise ScoreCoverageGap("score table does not cover the store")

    member_instances = test_idx[members]
    # Equal-count contract: the train side must match the test side exactly.
    take = min(cap, len(member_instances), len(train_idx))
    order = np.argsort(-susp[member_instances], kind="stable")
    test_subset = member_instances[order[:take]]

    space = store.space(assignment.space_name)
    centroid = assignment.centroids[cluster_id]
    diffs = space.vectors[train_idx].astype(np.float64) - centroid
    dists = np.sqrt(np.einsum("ij,ij->i", diffs, diffs))
    near_order = np.argsort(dists, kind="stable")
    train_subset = train_idx[near_order[:take]]
    train_subset = train_subset[np.argsort(-susp[train_subset], kind="stable")]

    return test_subset, train_subset


# -- persistence --------------------------------------------------------------

def write_clusters(path, assignment: ClusterAssignment,
                   store: AnalysisStore) -> None:
    """Export ``id,cluster`` rows for the test split, plus a metadata sidecar.

    The sidecar records the space and cluster count, which the CSV schema
    cannot carry but centroid-based contrast sets require.
    """
    test_idx = store.test_indices
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "cluster"])
        for pos, idx in enumerate(test_idx):
            writer.writerow([store.instances[idx].id, int(assignment.labels[pos])])
    meta = {
        "space": assignment.space_name,
        "n_clusters": assignment.n_clusters,
    }
    Path(str(path) + ".meta.json").write_text(
        json.dumps(meta) + "\n", encoding="utf-8"
    )


def read_clusters(path, store: AnalysisStore) -> ClusterAssignment:
    """Rebuild an assignment from the CSV + sidecar; centroids recomputed."""
    meta_path = Path(str(path) + ".meta.json")
    try:
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read cluster metadata {meta_path}: {exc}") from exc
    test_idx = store.test_indices
    position_of = {store.instances[idx].id: pos for pos, idx in enumerate(test_idx)}
    labels = np.full(len(test_idx), -1, dtype=np.intp)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["id", "cluster"]:
            raise ParseError(f"{path}: unexpected cluster header {header}")
        for row in reader:
            if len(row) != 2:
                raise ParseError(f"{path}: malformed row {row}")
            iid, label = row
            if iid not in position_of:
                raise ParseError(f"{path}: {iid!r} is not a test instance")
            labels[position_of[iid]] = int(label)
    if np.any(labels < 0):
        raise ParseError(f"{path}: not every test instance has a cluster")
    space = store.space(meta["space"])
    test_rows = space.vectors[test_idx].astype(np.float64)
    n_clusters = int(meta["n_clusters"])
    centroids = np.vstack([
        test_rows[labels == label].mean(axis=0) for label in range(n_clusters)
    ])
    return ClusterAssignment(
        space_name=meta["space"],
        n_clusters=n_clusters,
        labels=labels,
        centroids=centroids,
    )
