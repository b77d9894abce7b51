"""Attribute-based covariate-shift benchmark comparing scoring methods.

For each (attribute, polarity) pair the train split is filtered to instances
where the attribute equals the polarity, the full test split is scored, and
AUROC against shift membership (attribute != polarity) measures how well a
method surfaces the shifted instances.  Models refit per experiment with a
seed derived from the root seed plus the experiment index.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .data import AnalysisStore
from .errors import NoAttributes, SingleClass, SplitEmpty
from .kliep import KliepDensityRatio, TrainConfig
from .scoring import CenterDistanceDetector, IsolationForestDetector
from .validation import as_vector

DEFAULT_METHODS = ("density_ratio", "isolation_forest", "center_distance")

POLARITIES = ("present", "absent")


@dataclass(frozen=True)
class ShiftExperiment:
    """One synthetic covariate shift: train filtered by an attribute value."""

    attribute: str
    polarity: str  # "present" (=1) or "absent" (=0)
    train_indices: np.ndarray
    test_indices: np.ndarray
    ground_truth: np.ndarray  # 1 iff the test instance violates the polarity


@dataclass(frozen=True)
class BenchReport:
    rows: tuple  # (method, space, attribute, polarity, auroc)
    means: dict  # method -> mean auroc


def generate_experiments(store: AnalysisStore) -> list[ShiftExperiment]:
    """One experiment per (attribute, polarity), skipping degenerate ones.

    Degenerate means an empty filtered train split or a single-class test
    ground truth (the attribute never or always differs from the polarity).
    """
    if any(rec.attributes is None for rec in store.instances):
        raise NoAttributes("every instance needs attribute labels to benchmark")
    store.require_both_splits()
    attributes = sorted(store.instances[0].attributes)
    if not attributes:
        raise NoAttributes("manifest has an empty attribute schema")
    train_idx = store.train_indices
    test_idx = store.test_indices

    experiments = []
    for attribute in attributes:
        values = np.array(
            [rec.attributes[attribute] for rec in store.instances], dtype=np.intp
        )
        for polarity in POLARITIES:
            wanted = 1 if polarity == "present" else 0
            filtered_train = train_idx[values[train_idx] == wanted]
            ground_truth = (values[test_idx] != wanted).astype(np.intp)
            if len(filtered_train) == 0:
                continue
            if ground_truth.min() == ground_truth.max():
                continue
            experiments.append(ShiftExperiment(
                attribute=attribute,
                polarity=polarity,
                train_indices=filtered_train,
                test_indices=test_idx,
                ground_truth=ground_truth,
            ))
    return experiments


def auroc(scores, labels) -> float:
    """Probability a random positive outranks a random negative, ties half."""
    scores = as_vector(scores, "scores")
    labels = np.asarray(labels)
    if scores.shape[0] != labels.shape[0]:
        raise SingleClass("scores and labels must have equal length")
    pos = labels == 1
    neg = labels == 0
    n_pos, n_neg = int(pos.sum()), int(neg.sum())
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("AUROC needs both positive and negative labels")
    ranks = rankdata(scores)  # average ranks handle ties as half-wins
    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def _experiment_scores(store, experiment, method, space_name, config, seed):
    vectors = store.space(space_name).vectors.astype(np.float64)
    train_rows = vectors[experiment.train_indices]
    test_rows = vectors[experiment.test_indices]
    if method == "density_ratio":
        model = KliepDensityRatio(
            epochs=config.epochs,
            learning_rate=config.learning_rate,
            batch_size=config.batch_size,
            seed=seed,
        )
        model.fit(train_rows, test_rows)
        # Low ratio marks a shifted instance; negate so higher = more shifted.
        return -model.predict_ratio(test_rows)
    if method == "isolation_forest":
        stacked = np.vstack([train_rows, test_rows])
        forest = IsolationForestDetector(seed=seed).fit(stacked)
        return forest.score_samples(test_rows)
    if method == "center_distance":
        detector = CenterDistanceDetector().fit(train_rows)
        return detector.score_samples(test_rows)
    raise ValueError(f"unknown benchmark method {method!r}")


def run_benchmark(store: AnalysisStore, methods=DEFAULT_METHODS,
                  spaces=("imagenet",), config: TrainConfig | None = None) -> BenchReport:
    """Refit and score every experiment x space x method combination."""
    config = config or TrainConfig()
    experiments = generate_experiments(store)
    if not experiments:
        raise SplitEmpty("no non-degenerate experiments could be generated")
    rows = []
    per_method: dict[str, list] = {m: [] for m in methods}
    for exp_index, experiment in enumerate(experiments):
        seed = config.seed + exp_index
        for space_name in spaces:
            for method in methods:
                scores = _experiment_scores(
                    store, experiment, method, space_name, config, seed
                )
                value = auroc(scores, experiment.ground_truth)
                rows.append((
                    method, space_name, experiment.attribute,
                    experiment.polarity, value,
                ))
                per_method[method].append(value)
    means = {m: float(np.mean(v)) for m, v in per_method.items()}
    return BenchReport(rows=tuple(rows), means=means)


def write_report(path, report: BenchReport) -> None:
    """CSV rows plus one ``method,,MEAN,,value`` summary row per method."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "space", "attribute", "polarity", "auroc"])
        for method, space, attribute, polarity, value in report.rows:
            writer.writerow([method, space, attribute, polarity, repr(value)])
        for method in sorted(report.means):
            writer.writerow([method, "", "MEAN", "", repr(report.means[method])])
