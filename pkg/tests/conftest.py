import json

import numpy as np
import pytest

from shiftscope.data import InstanceRecord, LatentSpace, build_store


def make_records(n_train, n_test, attributes=None):
    """Synthetic manifest records; attributes is {name: array} per instance."""
    records = []
    for i in range(n_train + n_test):
        split = "train" if i < n_train else "test"
        attrs = None
        if attributes is not None:
            attrs = {name: int(vals[i]) for name, vals in attributes.items()}
        records.append(InstanceRecord(
            id=f"img-{i:05d}",
            split=split,
            image_path=f"images/img-{i:05d}.png",
            attributes=attrs,
        ))
    return records


def make_store(train_vectors, test_vectors, space_name="imagenet",
               attributes=None):
    train_vectors = np.asarray(train_vectors, dtype=np.float32)
    test_vectors = np.asarray(test_vectors, dtype=np.float32)
    records = make_records(len(train_vectors), len(test_vectors), attributes)
    vectors = np.vstack([train_vectors, test_vectors])
    return build_store(records, [LatentSpace(space_name, vectors)])


def gaussian_shift_data(n_train=1000, n_unshifted=900, n_shifted=100,
                        offset=(5.0, 5.0), seed=7):
    """Train N(0,I); test = unshifted N(0,I) + a shifted cluster at *offset*."""
    rng = np.random.default_rng(seed)
    train = rng.normal(size=(n_train, 2))
    unshifted = rng.normal(size=(n_unshifted, 2))
    shifted = rng.normal(size=(n_shifted, 2)) + np.asarray(offset)
    test = np.vstack([unshifted, shifted])
    membership = np.concatenate([
        np.zeros(n_unshifted, dtype=int), np.ones(n_shifted, dtype=int)
    ])
    return train, test, membership


@pytest.fixture
def gaussian_shift_store():
    train, test, membership = gaussian_shift_data(
        n_train=300, n_unshifted=250, n_shifted=50
    )
    store = make_store(train, test)
    return store, membership


def write_manifest_file(path, records):
    payload = {"instances": []}
    for rec in records:
        entry = {"id": rec.id, "split": rec.split, "image": rec.image_path}
        if rec.attributes is not None:
            entry["attributes"] = rec.attributes
        payload["instances"].append(entry)
    path.write_text(json.dumps(payload), encoding="utf-8")
