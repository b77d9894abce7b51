"""Read-only HTTP API over a store directory, plus the findings journal.

All analytic state is loaded once and immutable for the process lifetime, so
identical GETs return byte-identical bodies.  The single mutable path is the
append-only findings journal.  Interaction linking (projection highlighting,
navigation) is a client concern; the service holds no session state.
"""

from __future__ import annotations

import mimetypes
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse, JSONResponse

from . import store as store_mod
from .data import AnalysisStore
from .errors import MissingArtifact, PortUnavailable, ShiftScopeError, UnknownInstance
from .histogram import SideBySideHistogram, build_side_by_side
from .neighborhood import adaptive_neighborhood
from .clustering import cluster_contrast_set, rank_clusters
from .scoring import ScoreTable


@dataclass
class ServiceState:
    store: AnalysisStore
    store_dir: Path
    scores: list          # ScoreTable, possibly several (method, space)
    clusters: object      # ClusterAssignment or None
    projection: object    # ProjectionTable or None


def load_state(store_dir) -> ServiceState:
    store, _model = store_mod.load_store(store_dir)
    return ServiceState(
        store=store,
        store_dir=Path(store_dir),
        scores=list(store.scores or []),
        clusters=store.clusters,
        projection=store.projection,
    )


def _active_scores(state: ServiceState) -> ScoreTable:
    if not state.scores:
        raise MissingArtifact("no scores computed; run `score` first")
    for table in state.scores:
        if table.method == "density_ratio":
            return table
    return sorted(state.scores, key=lambda t: (t.method, t.space_name))[0]


def _default_space(state: ServiceState) -> str:
    preferred = _active_scores(state).space_name
    if preferred in state.store.spaces:
        return preferred
    return sorted(state.store.spaces)[0]


def _histogram_payload(state: ServiceState, hist: SideBySideHistogram) -> dict:
    ids = [rec.id for rec in state.store.instances]
    return {
        "subject": hist.subject,
        "n_bins": hist.n_bins,
        "bins": [
            {
                "lo": b.lo,
                "hi": b.hi,
                "train": [ids[i] for i in b.train_members],
                "test": [ids[i] for i in b.test_members],
            }
            for b in hist.bins
        ],
    }


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="shiftscope", docs_url=None, redoc_url=None)
    # the browser client is served statically from elsewhere; this is a
    # local, read-only analyst tool, so permissive CORS is fine
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
        allow_headers=["*"],
    )
    store = state.store
    ids = [rec.id for rec in store.instances]

    @app.exception_handler(ShiftScopeError)
    async def _domain_error(request, exc: ShiftScopeError):
        status = 409 if isinstance(exc, MissingArtifact) else 404
        return JSONResponse(
            status_code=status,
            content={"error": type(exc).__name__, "message": str(exc)},
        )

    @app.get("/api/dataset")
    def dataset():
        return {
            "counts": {
                "train": int(len(store.train_indices)),
                "test": int(len(store.test_indices)),
            },
            "spaces": {name: sp.dim for name, sp in sorted(store.spaces.items())},
            "methods": [
                {"method": t.method, "space": t.space_name}
                for t in sorted(state.scores, key=lambda t: (t.method, t.space_name))
            ],
            "clusters_available": state.clusters is not None,
            "projection_available": state.projection is not None,
        }

    @app.get("/api/instances")
    def instances(split: str | None = None, sort: str = "suspicion",
                  offset: int = Query(0, ge=0), limit: int = Query(50, ge=1)):
        if sort != "suspicion":
            raise HTTPException(400, detail=f"unsupported sort {sort!r}")
        if split is not None and split not in ("train", "test"):
            raise HTTPException(400, detail=f"unknown split {split!r}")
        scores = _active_scores(state)
        if split is None:
            candidates = range(store.n_instances)
        else:
            candidates = store.split_indices(split).tolist()
        ranked = sorted(candidates, key=lambda i: (-scores.suspicion[i], i))
        page = ranked[offset:offset + limit]
        return {
            "total": len(ranked),
            "offset": offset,
            "items": [
                {
                    "id": ids[i],
                    "split": store.instances[i].split,
                    "suspicion": float(scores.suspicion[i]),
                }
                for i in page
            ],
        }

    @app.get("/api/instances/{instance_id}")
    def instance_detail(instance_id: str):
        idx = store.index_of(instance_id)
        rec = store.instances[idx]
        return {
            "id": rec.id,
            "split": rec.split,
            "image": rec.image_path,
            "attributes": rec.attributes,
            "scores": [
                {
                    "method": t.method,
                    "space": t.space_name,
                    "raw": float(t.raw[idx]),
                    "ratio": None if t.ratio is None else float(t.ratio[idx]),
                    "suspicion": float(t.suspicion[idx]),
                }
                for t in sorted(state.scores, key=lambda t: (t.method, t.space_name))
            ],
        }

    @app.get("/api/neighbors/{instance_id}")
    def neighbors(instance_id: str, space: str | None = None,
                  target: int = Query(100, ge=1), min: int = Query(10, ge=1)):
        idx = store.index_of(instance_id)
        space_name = space or _default_space(state)
        hood = adaptive_neighborhood(
            store, space_name, idx, target_test_count=target, min_count=min
        )
        return {
            "focus": instance_id,
            "space": space_name,
            "radius": hood.radius,
            "train": [ids[i] for i in hood.train_members],
            "test": [ids[i] for i in hood.test_members],
        }

    @app.get("/api/histogram/focus/{instance_id}")
    def focus_histogram(instance_id: str, space: str | None = None,
                        target: int = Query(100, ge=1), min: int = Query(10, ge=1)):
        idx = store.index_of(instance_id)
        space_name = space or _default_space(state)
        scores = _active_scores(state)
        hood = adaptive_neighborhood(
            store, space_name, idx, target_test_count=target, min_count=min
        )
        hist = build_side_by_side(
            hood.train_members, hood.test_members, scores, subject=instance_id
        )
        return _histogram_payload(state, hist)

    def _require_clusters(space: str | None):
        if state.clusters is None:
            raise MissingArtifact("no clusters computed; run `cluster` first")
        if space is not None and space != state.clusters.space_name:
            raise MissingArtifact(
                f"clusters were computed in space {state.clusters.space_name!r}, "
                f"not {space!r}"
            )
        return state.clusters

    @app.get("/api/clusters")
    def clusters(space: str | None = None, top: int = Query(10, ge=1)):
        assignment = _require_clusters(space)
        scores = _active_scores(state)
        summaries = rank_clusters(store, assignment, scores, top_k=top)
        test_idx = store.test_indices
        return {
            "space": assignment.space_name,
            "n_clusters": assignment.n_clusters,
            "clusters": [
                {
                    "cluster_id": s.cluster_id,
                    "size": s.size,
                    "mean_suspicion": s.mean_suspicion,
                    "representatives": [
                        ids[test_idx[p]] for p in s.representative_indices
                    ],
                }
                for s in summaries
            ],
        }

    @app.get("/api/clusters/{cluster_id}/histogram")
    def cluster_histogram(cluster_id: int):
        assignment = _require_clusters(None)
        scores = _active_scores(state)
        test_subset, train_subset = cluster_contrast_set(
            store, assignment, cluster_id, scores
        )
        hist = build_side_by_side(
            train_subset, test_subset, scores, subject=cluster_id
        )
        return _histogram_payload(state, hist)

    @app.get("/api/projection")
    def projection():
        if state.projection is None:
            raise MissingArtifact("no projection computed; run `project` first")
        return [
            {"id": iid, "x": float(x), "y": float(y)}
            for iid, (x, y) in zip(state.projection.ids, state.projection.coords)
        ]

    @app.get("/images/{instance_id}")
    def image(instance_id: str):
        idx = store.index_of(instance_id)
        rel = store.instances[idx].image_path
        root = state.store_dir.resolve()
        path = (root / rel).resolve()
        if root not in path.parents and path != root:
            raise HTTPException(400, detail="image path escapes the store")
        if not path.is_file():
            raise HTTPException(404, detail=f"image file missing for {instance_id}")
        media_type = mimetypes.guess_type(path.name)[0] or "application/octet-stream"
        return FileResponse(path, media_type=media_type)

    @app.post("/api/findings", status_code=201)
    def add_finding(body: dict):
        description = body.get("description")
        if not isinstance(description, str) or not description.strip():
            raise HTTPException(400, detail="description must be non-empty")
        instance_ids = body.get("instance_ids") or []
        if not isinstance(instance_ids, list):
            raise HTTPException(400, detail="instance_ids must be a list")
        for iid in instance_ids:
            if iid not in store._index_by_id:
                raise UnknownInstance(f"unknown instance id {iid!r}")
        finding = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "description": description,
            "instance_ids": instance_ids,
        }
        store_mod.append_finding(state.store_dir, finding)
        return finding

    return app


def serve(store_dir, host="127.0.0.1", port=8080):
    """Load the store and run the API server (blocking)."""
    import uvicorn

    state = load_state(store_dir)
    if not state.scores:
        raise MissingArtifact("store has no scores; run `score` before `serve`")
    app = create_app(state)
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except OSError as exc:
        raise PortUnavailable(f"cannot bind {host}:{port}: {exc}") from exc
