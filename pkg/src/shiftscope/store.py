"""Store directory layout: the on-disk home of one analysis.

    DIR/
      manifest.json        instance records (array order = index)
      spaces/NAME.dsem     one embedding matrix per latent space
      model.json           trained ratio model (after `train`)
      scores.csv           score tables, possibly several (method, space)
      clusters.csv(+meta)  test-split cluster assignment
      projection.csv       2D coordinates of the test split
      findings.jsonl       append-only analyst findings journal

Writers take an advisory lock file so two pipeline commands cannot race;
readers never lock.
"""

from __future__ import annotations

import json
from contextlib import contextmanager
from pathlib import Path

from . import clustering, projection, scoring
from .data import AnalysisStore, build_store, load_embeddings, load_manifest
from .errors import MissingArtifact, StoreLocked
from .kliep import KliepDensityRatio, load_model

MANIFEST = "manifest.json"
SPACES_DIR = "spaces"
MODEL = "model.json"
SCORES = "scores.csv"
CLUSTERS = "clusters.csv"
PROJECTION = "projection.csv"
FINDINGS = "findings.jsonl"
LOCKFILE = ".lock"


@contextmanager
def write_lock(store_dir):
    """Advisory exclusive lock for commands that mutate the store."""
    store_dir = Path(store_dir)
    store_dir.mkdir(parents=True, exist_ok=True)
    lock_path = store_dir / LOCKFILE
    try:
        fd = lock_path.open("x")
    except FileExistsError:
        raise StoreLocked(
            f"{store_dir} is locked by another writer (stale? remove {lock_path})"
        ) from None
    try:
        yield
    finally:
        fd.close()
        lock_path.unlink(missing_ok=True)


def space_path(store_dir, name: str) -> Path:
    return Path(store_dir) / SPACES_DIR / f"{name}.dsem"


def list_spaces(store_dir) -> list[str]:
    spaces_dir = Path(store_dir) / SPACES_DIR
    if not spaces_dir.is_dir():
        return []
    return sorted(p.stem for p in spaces_dir.glob("*.dsem"))


def load_store(store_dir, with_artifacts=True) -> tuple[AnalysisStore, KliepDensityRatio | None]:
    """Load manifest + spaces (+ any computed artifacts) from a directory."""
    store_dir = Path(store_dir)
    manifest_path = store_dir / MANIFEST
    if not manifest_path.is_file():
        raise MissingArtifact(f"{store_dir} has no {MANIFEST}; run ingest first")
    records = load_manifest(manifest_path)
    spaces = [
        load_embeddings(space_path(store_dir, name), len(records), name=name)
        for name in list_spaces(store_dir)
    ]
    store = build_store(records, spaces)

    model = None
    if not with_artifacts:
        return store, model

    model_path = store_dir / MODEL
    if model_path.is_file():
        model = load_model(model_path)
    scores_path = store_dir / SCORES
    if scores_path.is_file():
        store = store.with_artifacts(scores=scoring.read_scores(scores_path, store))
    clusters_path = store_dir / CLUSTERS
    if clusters_path.is_file():
        store = store.with_artifacts(
            clusters=clustering.read_clusters(clusters_path, store)
        )
    projection_path = store_dir / PROJECTION
    if projection_path.is_file():
        store = store.with_artifacts(
            projection=projection.load_external_projection(projection_path, store)
        )
    return store, model


def append_finding(store_dir, finding: dict) -> None:
    """Append one JSON object to the findings journal."""
    path = Path(store_dir) / FINDINGS
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(finding) + "\n")
