"""Batch pipeline driver: ingest -> train -> score -> cluster -> project ->
bench -> serve, all operating on one store directory.

Module errors map to distinct nonzero exit codes (see errors.py); usage
errors exit with argparse's status 2.
"""

from __future__ import annotations

import argparse
import shutil
import sys
from pathlib import Path

from . import store as store_mod
from .bench import run_benchmark, write_report
from .clustering import cluster_store, write_clusters
from .data import load_embeddings, load_manifest, write_embeddings
from .errors import MissingModel, ShiftScopeError
from .kliep import TrainConfig, save_model, train_dre
from .projection import load_external_projection, project_store, write_projection
from .scoring import score_dataset, write_scores

METHOD_ALIASES = {
    "density-ratio": "density_ratio",
    "iforest": "isolation_forest",
    "center": "center_distance",
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="shiftscope",
        description="Detect and explore covariate shift between two "
                    "embedding collections.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="import a manifest plus one embedding file")
    p.add_argument("--manifest", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--space", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("train", help="train the density-ratio model")
    p.add_argument("--store", required=True)
    p.add_argument("--space", required=True)
    p.add_argument("--hidden", type=int, default=32)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--batch", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("score", help="score every instance with one method")
    p.add_argument("--store", required=True)
    p.add_argument("--method", required=True, choices=sorted(METHOD_ALIASES))
    p.add_argument("--space", required=True)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("cluster", help="cluster the test split")
    p.add_argument("--store", required=True)
    p.add_argument("--space", required=True)
    p.add_argument("--k", type=int, default=100)
    p.add_argument("--top", type=int, default=10)

    p = sub.add_parser("project", help="compute or import the 2D overview")
    p.add_argument("--store", required=True)
    p.add_argument("--space")
    p.add_argument("--method", choices=["pca"], default="pca")
    p.add_argument("--import", dest="import_csv")

    p = sub.add_parser("bench", help="run the attribute-shift benchmark")
    p.add_argument("--store", required=True)
    p.add_argument("--methods", default=",".join(sorted(METHOD_ALIASES)))
    p.add_argument("--spaces", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("serve", help="serve the analysis API")
    p.add_argument("--store", required=True)
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")

    return parser


def _cmd_ingest(args):
    records = load_manifest(args.manifest)
    space = load_embeddings(args.embeddings, len(records), name=args.space)
    out = Path(args.out)
    with store_mod.write_lock(out):
        manifest_dst = out / store_mod.MANIFEST
        if manifest_dst.exists():
            existing = load_manifest(manifest_dst)
            if existing != records:
                raise ShiftScopeError(
                    f"{manifest_dst} differs from --manifest; refusing to mix datasets"
                )
        else:
            shutil.copyfile(args.manifest, manifest_dst)
        dst = store_mod.space_path(out, args.space)
        dst.parent.mkdir(parents=True, exist_ok=True)
        write_embeddings(dst, space)
    print(f"ingested {len(records)} instances into {out} (space {args.space!r})")


def _cmd_train(args):
    store, _ = store_mod.load_store(args.store, with_artifacts=False)
    config = TrainConfig(
        epochs=args.epochs,
        learning_rate=args.lr,
        batch_size=args.batch,
        seed=args.seed,
    )
    model, history, dre_space = train_dre(
        store, args.space, config, hidden_dim=args.hidden
    )
    with store_mod.write_lock(args.store):
        save_model(model, Path(args.store) / store_mod.MODEL)
        write_embeddings(store_mod.space_path(args.store, dre_space.name), dre_space)
    print(f"trained on {args.space!r}: final loss {history[-1]:.6f} "
          f"({len(history)} epochs)")


def _cmd_score(args):
    store, model = store_mod.load_store(args.store)
    method = METHOD_ALIASES[args.method]
    if method == "density_ratio" and model is None:
        raise MissingModel("no model.json in the store; run `train` first")
    table = score_dataset(
        store, method, args.space, model=model, seed=args.seed
    )
    scores_path = Path(args.store) / store_mod.SCORES
    tables = [t for t in (store.scores or [])
              if (t.method, t.space_name) != (method, args.space)]
    tables.append(table)
    with store_mod.write_lock(args.store):
        write_scores(scores_path, tables, store)
    print(f"scored {store.n_instances} instances with {method} on {args.space!r}")


def _cmd_cluster(args):
    store, _ = store_mod.load_store(args.store)
    assignment = cluster_store(store, args.space, n_clusters=args.k)
    with store_mod.write_lock(args.store):
        write_clusters(Path(args.store) / store_mod.CLUSTERS, assignment, store)
    print(f"clustered test split into {assignment.n_clusters} clusters "
          f"on {args.space!r}")


def _cmd_project(args):
    store, _ = store_mod.load_store(args.store, with_artifacts=False)
    if args.import_csv:
        table = load_external_projection(args.import_csv, store)
    else:
        if not args.space:
            raise ShiftScopeError("project needs --space unless importing a CSV")
        table = project_store(store, args.space)
    with store_mod.write_lock(args.store):
        write_projection(Path(args.store) / store_mod.PROJECTION, table)
    print(f"projected {len(table.ids)} test instances")


def _cmd_bench(args):
    store, _ = store_mod.load_store(args.store, with_artifacts=False)
    methods = tuple(METHOD_ALIASES[m] for m in args.methods.split(","))
    spaces = tuple(args.spaces.split(","))
    report = run_benchmark(store, methods=methods, spaces=spaces,
                           config=TrainConfig(seed=args.seed))
    write_report(args.out, report)
    summary = ", ".join(f"{m}={v:.3f}" for m, v in sorted(report.means.items()))
    print(f"benchmark written to {args.out} (mean AUROC: {summary})")


def _cmd_serve(args):
    # Imported lazily so pipeline commands work without the service stack.
    from .service import serve
    serve(args.store, host=args.host, port=args.port)


_COMMANDS = {
    "ingest": _cmd_ingest,
    "train": _cmd_train,
    "score": _cmd_score,
    "cluster": _cmd_cluster,
    "project": _cmd_project,
    "bench": _cmd_bench,
    "serve": _cmd_serve,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except ShiftScopeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
