"""Data model and ingestion: manifests, embedding files, and the analysis store.

File formats
------------
Manifest: UTF-8 JSON ``{"instances": [{"id": str, "split": "train"|"test",
"image": str, "attributes": {str: 0|1}?}, ...]}``.  Array order defines the
instance index used by every downstream artifact.

Embedding file (``.dsem``): magic ``DSEM``, u32-LE version (=1), u64-LE count,
u32-LE dim, then ``count * dim`` IEEE-754 binary32 LE values, row-major.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import (
    AttributeSchemaMismatch,
    BadMagic,
    CountMismatch,
    DimensionMismatch,
    DuplicateId,
    NonFiniteValue,
    ParseError,
    RowCountMismatch,
    SplitEmpty,
    UnknownInstance,
    UnknownSpace,
)

DSEM_MAGIC = b"DSEM"
DSEM_VERSION = 1
_HEADER = struct.Struct("<4sIQI")  # magic, version, count, dim

SPLITS = ("train", "test")


@dataclass(frozen=True)
class InstanceRecord:
    """One image: identity, split membership, asset path, optional labels."""

    id: str
    split: str
    image_path: str
    attributes: dict | None = None


@dataclass(frozen=True)
class LatentSpace:
    """A named dense matrix of embedding vectors, one row per instance."""

    name: str
    vectors: np.ndarray  # float32, shape (n_instances, dim), read-only

    def __post_init__(self):
        vecs = np.ascontiguousarray(self.vectors, dtype=np.float32)
        if vecs.ndim != 2:
            raise DimensionMismatch(
                f"space {self.name!r} must be a 2D matrix, got shape {vecs.shape}"
            )
        if not np.all(np.isfinite(vecs)):
            raise NonFiniteValue(f"space {self.name!r} contains NaN or Inf")
        vecs.setflags(write=False)
        object.__setattr__(self, "vectors", vecs)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def count(self) -> int:
        return self.vectors.shape[0]


@dataclass(frozen=True)
class AnalysisStore:
    """Immutable bundle of instances plus any computed analysis artifacts.

    All artifacts index instances by manifest position; downstream modules
    read but never mutate instance data, so a built store is safe for any
    number of concurrent readers.
    """

    instances: tuple
    spaces: dict
    scores: object = None        # list[ScoreTable] or None
    clusters: object = None      # ClusterAssignment or None
    projection: object = None    # ProjectionTable or None
    _index_by_id: dict = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(
            self,
            "_index_by_id",
            {rec.id: i for i, rec in enumerate(self.instances)},
        )

    @property
    def n_instances(self) -> int:
        return len(self.instances)

    def index_of(self, instance_id: str) -> int:
        try:
            return self._index_by_id[instance_id]
        except KeyError:
            raise UnknownInstance(f"unknown instance id {instance_id!r}") from None

    def space(self, name: str) -> LatentSpace:
        try:
            return self.spaces[name]
        except KeyError:
            raise UnknownSpace(f"unknown space {name!r}") from None

    def split_indices(self, split: str) -> np.ndarray:
        return np.array(
            [i for i, rec in enumerate(self.instances) if rec.split == split],
            dtype=np.intp,
        )

    @property
    def train_indices(self) -> np.ndarray:
        return self.split_indices("train")

    @property
    def test_indices(self) -> np.ndarray:
        return self.split_indices("test")

    def require_both_splits(self):
        """Guard used before any training or scoring operation."""
        for split in SPLITS:
            if len(self.split_indices(split)) == 0:
                raise SplitEmpty(f"{split} split is empty")

    def with_artifacts(self, **kwargs) -> "AnalysisStore":
        """Return a copy with scores/clusters/projection attached."""
        return replace(self, **kwargs)


def load_manifest(path) -> list[InstanceRecord]:
    """Read and validate a manifest file, preserving record order."""
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot parse manifest {path}: {exc}") from exc

    if not isinstance(payload, dict) or not isinstance(payload.get("instances"), list):
        raise ParseError(f"manifest {path} missing top-level 'instances' array")

    records = []
    seen = set()
    attr_keys = None  # key set of the first record that carries attributes
    for pos, entry in enumerate(payload["instances"]):
        if not isinstance(entry, dict):
            raise ParseError(f"manifest entry {pos} is not an object")
        try:
            iid = entry["id"]
            split = entry["split"]
            image = entry["image"]
        except KeyError as exc:
            raise ParseError(f"manifest entry {pos} missing field {exc}") from None
        if not isinstance(iid, str) or not iid:
            raise ParseError(f"manifest entry {pos} has a non-string or empty id")
        if split not in SPLITS:
            raise ParseError(
                f"manifest entry {iid!r} has invalid split {split!r}"
            )
        if iid in seen:
            raise DuplicateId(f"duplicate instance id {iid!r}")
        seen.add(iid)

        attrs = entry.get("attributes")
        if attrs is not None:
            if not isinstance(attrs, dict) or not all(
                v in (0, 1) for v in attrs.values()
            ):
                raise ParseError(
                    f"attributes of {iid!r} must map names to 0/1"
                )
            attrs = dict(attrs)
        if pos == 0:
            attr_keys = None if attrs is None else frozenset(attrs)
        else:
            current = None if attrs is None else frozenset(attrs)
            if current != attr_keys:
                raise AttributeSchemaMismatch(
                    f"instance {iid!r} attribute keys differ from the manifest schema"
                )
        records.append(InstanceRecord(iid, split, image, attrs))
    return records


def write_manifest(path, records) -> None:
    """Serialize records back to the manifest format (array order = index)."""
    payload = {"instances": []}
    for rec in records:
        entry = {"id": rec.id, "split": rec.split, "image": rec.image_path}
        if rec.attributes is not None:
            entry["attributes"] = rec.attributes
        payload["instances"].append(entry)
    Path(path).write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")


def load_embeddings(path, expected_count, expected_dim=None, name=None) -> LatentSpace:
    """Read a .dsem file into a LatentSpace, validating header and values."""
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read embeddings {path}: {exc}") from exc
    if len(blob) < _HEADER.size or blob[:4] != DSEM_MAGIC:
        raise BadMagic(f"{path} does not start with the DSEM header")
    magic, version, count, dim = _HEADER.unpack_from(blob)
    if version != DSEM_VERSION:
        raise ParseError(f"{path}: unsupported DSEM version {version}")
    if count != expected_count:
        raise CountMismatch(
            f"{path}: header count {count} != expected {expected_count}"
        )
    if expected_dim is not None and dim != expected_dim:
        raise DimensionMismatch(
            f"{path}: header dim {dim} != expected {expected_dim}"
        )
    body = blob[_HEADER.size:]
    expected_bytes = count * dim * 4
    if len(body) != expected_bytes:
        raise ParseError(
            f"{path}: payload is {len(body)} bytes, expected {expected_bytes}"
        )
    vectors = np.frombuffer(body, dtype="<f4").reshape(count, dim)
    if not np.all(np.isfinite(vectors)):
        raise NonFiniteValue(f"{path} contains NaN or Inf values")
    return LatentSpace(name or path.stem, vectors)


def write_embeddings(path, space_or_vectors) -> None:
    """Write vectors as a .dsem file (binary32 LE, row-major)."""
    if isinstance(space_or_vectors, LatentSpace):
        vectors = space_or_vectors.vectors
    else:
        vectors = np.ascontiguousarray(space_or_vectors, dtype=np.float32)
        if vectors.ndim != 2:
            raise DimensionMismatch("embeddings must be a 2D matrix")
        if not np.all(np.isfinite(vectors)):
            raise NonFiniteValue("refusing to write non-finite embeddings")
    count, dim = vectors.shape
    header = _HEADER.pack(DSEM_MAGIC, DSEM_VERSION, count, dim)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(vectors.astype("<f4", copy=False).tobytes(order="C"))


def build_store(records, spaces) -> AnalysisStore:
    """Assemble the immutable analysis store from records and latent spaces."""
    records = tuple(records)
    space_map = {}
    for space in spaces:
        if space.count != len(records):
            raise RowCountMismatch(
                f"space {space.name!r} has {space.count} rows for "
                f"{len(records)} instances"
            )
        space_map[space.name] = space
    return AnalysisStore(instances=records, spaces=space_map)
