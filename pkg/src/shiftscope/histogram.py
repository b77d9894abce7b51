"""The side-by-side histogram: aligned train/test bins over suspicion.

Five equal-width bins partition [0,1] -- [0,0.2), [0.2,0.4), [0.4,0.6),
[0.6,0.8), [0.8,1.0] -- presented highest interval first, each holding the
member indices of both sides sorted by descending suspicion.  Empty bins are
materialized so the two columns stay row-aligned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OutOfRange, ScoreCoverageGap
from .scoring import ScoreTable


@dataclass(frozen=True)
class HistogramBin:
    lo: float
    hi: float
    train_members: np.ndarray  # instance indices, descending suspicion
    test_members: np.ndarray

    @property
    def train_count(self) -> int:
        return len(self.train_members)

    @property
    def test_count(self) -> int:
        return len(self.test_members)


@dataclass(frozen=True)
class SideBySideHistogram:
    """Two aligned suspicion histograms; train on the left, test on the right."""

    subject: int | str
    n_bins: int
    bins: tuple  # HistogramBin, ordered top interval first


def bin_of(suspicion: float, n_bins: int = 5) -> int:
    """floor(suspicion * n_bins), with 1.0 clamped into the top bin.

    Implemented by comparing against the exact float edges k/n_bins so a
    stored suspicion equal to an edge always lands in that edge's bin.
    """
    if not 0.0 <= suspicion <= 1.0:
        raise OutOfRange(f"suspicion {suspicion} outside [0, 1]")
    edges = np.arange(1, n_bins) / n_bins
    idx = int(np.searchsorted(edges, suspicion, side="right"))
    return min(idx, n_bins - 1)


def _bin_side(indices, suspicion, n_bins):
    indices = np.asarray(indices, dtype=np.intp)
    by_bin = [[] for _ in range(n_bins)]
    # Descending suspicion with stable ties keeps lower indices first.
    order = np.argsort(-suspicion[indices], kind="stable")
    for idx in indices[order]:
        by_bin[bin_of(float(suspicion[idx]), n_bins)].append(int(idx))
    return [np.array(b, dtype=np.intp) for b in by_bin]


def build_side_by_side(train_indices, test_indices, scores: ScoreTable,
                       subject, n_bins: int = 5) -> SideBySideHistogram:
    """Partition both member lists into aligned suspicion bins, top-first."""
    all_members = np.concatenate([
        np.asarray(train_indices, dtype=np.intp),
        np.asarray(test_indices, dtype=np.intp),
    ])
    if not scores.covers(all_members):
        raise ScoreCoverageGap("score table does not cover all given members")

    train_bins = _bin_side(train_indices, scores.suspicion, n_bins)
    test_bins = _bin_side(test_indices, scores.suspicion, n_bins)
    bins = []
    for k in range(n_bins - 1, -1, -1):
        bins.append(HistogramBin(
            lo=k / n_bins,
            hi=(k + 1) / n_bins,
            train_members=train_bins[k],
            test_members=test_bins[k],
        ))
    return SideBySideHistogram(subject=subject, n_bins=n_bins, bins=tuple(bins))
