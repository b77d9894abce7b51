import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from shiftscope.cli import main
from shiftscope.data import write_embeddings
from shiftscope.service import create_app, load_state

from conftest import gaussian_shift_data, make_records, write_manifest_file

PNG_1X1 = bytes.fromhex(
    "89504e470d0a1a0a0000000d49484452000000010000000108060000001f15c489"
    "0000000d49444154789c626001000000ffff03000006000557bfabd40000000049"
    "454e44ae426082"
)


@pytest.fixture(scope="module")
def service_store(tmp_path_factory):
    """Full store directory: ingest, train, score, cluster, project."""
    root = tmp_path_factory.mktemp("svc")
    train, test, _ = gaussian_shift_data(n_train=120, n_unshifted=90,
                                         n_shifted=30)
    records = make_records(len(train), len(test))
    manifest = root / "manifest.json"
    write_manifest_file(manifest, records)
    dsem = root / "imagenet.dsem"
    write_embeddings(dsem, np.vstack([train, test]).astype(np.float32))
    store_dir = root / "store"

    def run(argv):
        assert main([str(a) for a in argv]) == 0

    run(["ingest", "--manifest", manifest, "--embeddings", dsem,
         "--space", "imagenet", "--out", store_dir])
    run(["train", "--store", store_dir, "--space", "imagenet",
         "--epochs", "5", "--seed", "3"])
    run(["score", "--store", store_dir, "--method", "density-ratio",
         "--space", "imagenet"])
    run(["cluster", "--store", store_dir, "--space", "dre", "--k", "15"])
    run(["project", "--store", store_dir, "--space", "imagenet"])

    images = store_dir / "images"
    images.mkdir()
    for rec in records[:3]:
        (store_dir / rec.image_path).write_bytes(PNG_1X1)
    return store_dir


@pytest.fixture(scope="module")
def client(service_store):
    state = load_state(service_store)
    return TestClient(create_app(state))


class TestDataset:
    def test_counts_and_spaces(self, client):
        body = client.get("/api/dataset").json()
        assert body["counts"] == {"train": 120, "test": 120}
        assert set(body["spaces"]) == {"imagenet", "dre"}
        assert {"method": "density_ratio", "space": "imagenet"} in body["methods"]
        assert body["clusters_available"] is True

    def test_idempotent_bytes(self, client):
        for path in ("/api/dataset", "/api/instances?limit=10",
                     "/api/clusters", "/api/projection"):
            first = client.get(path)
            second = client.get(path)
            assert first.content == second.content


class TestInstances:
    def test_sorted_descending(self, client):
        body = client.get("/api/instances?split=test&limit=200").json()
        assert body["total"] == 120
        susp = [item["suspicion"] for item in body["items"]]
        assert susp == sorted(susp, reverse=True)

    def test_paging(self, client):
        page1 = client.get("/api/instances?limit=5").json()
        page2 = client.get("/api/instances?offset=5&limit=5").json()
        assert len(page1["items"]) == 5
        ids1 = {i["id"] for i in page1["items"]}
        ids2 = {i["id"] for i in page2["items"]}
        assert not ids1 & ids2

    def test_detail_resolves(self, client):
        listed = client.get("/api/instances?limit=3").json()["items"]
        for item in listed:
            detail = client.get(f"/api/instances/{item['id']}").json()
            assert detail["id"] == item["id"]
            assert detail["scores"]

    def test_unknown_id(self, client):
        resp = client.get("/api/instances/unknown-id")
        assert resp.status_code == 404
        assert resp.json()["error"] == "UnknownInstance"

    def test_bad_sort(self, client):
        assert client.get("/api/instances?sort=magic").status_code == 400


class TestNeighbors:
    def test_payload(self, client):
        listed = client.get("/api/instances?split=test&limit=1").json()
        focus = listed["items"][0]["id"]
        body = client.get(f"/api/neighbors/{focus}?target=20&min=5").json()
        assert body["focus"] == focus
        assert body["radius"] > 0
        assert focus not in body["test"]
        assert len(body["test"]) >= 20

    def test_every_id_resolves(self, client):
        focus = client.get("/api/instances?split=test&limit=1") \
            .json()["items"][0]["id"]
        body = client.get(f"/api/neighbors/{focus}?target=10&min=5").json()
        for iid in body["train"][:3] + body["test"][:3]:
            assert client.get(f"/api/instances/{iid}").status_code == 200


class TestHistograms:
    def test_focus_histogram_recount(self, client):
        focus = client.get("/api/instances?split=test&limit=1") \
            .json()["items"][0]["id"]
        hood = client.get(f"/api/neighbors/{focus}?target=30&min=5").json()
        body = client.get(
            f"/api/histogram/focus/{focus}?target=30&min=5"
        ).json()
        assert body["subject"] == focus
        assert len(body["bins"]) == 5
        # top-first interval ordering
        los = [b["lo"] for b in body["bins"]]
        assert los == [0.8, 0.6, 0.4, 0.2, 0.0]
        # client-side recount equals payload counts
        assert sum(len(b["train"]) for b in body["bins"]) == len(hood["train"])
        assert sum(len(b["test"]) for b in body["bins"]) == len(hood["test"])

    def test_bin_membership_against_scores(self, client):
        focus = client.get("/api/instances?split=test&limit=1") \
            .json()["items"][0]["id"]
        body = client.get(f"/api/histogram/focus/{focus}?target=20&min=5").json()
        for b in body["bins"]:
            for iid in b["train"] + b["test"]:
                detail = client.get(f"/api/instances/{iid}").json()
                susp = detail["scores"][0]["suspicion"]
                assert b["lo"] <= susp < b["hi"] or (
                    b["hi"] == 1.0 and susp == 1.0
                )


class TestClusters:
    def test_ranked_summaries(self, client):
        body = client.get("/api/clusters").json()
        clusters = body["clusters"]
        assert len(clusters) <= 10
        means = [c["mean_suspicion"] for c in clusters]
        assert means == sorted(means, reverse=True)
        for c in clusters:
            assert len(c["representatives"]) <= 9
            assert c["size"] >= 1

    def test_cluster_histogram_equal_sides(self, client):
        cid = client.get("/api/clusters").json()["clusters"][0]["cluster_id"]
        body = client.get(f"/api/clusters/{cid}/histogram").json()
        assert body["subject"] == cid
        train_total = sum(len(b["train"]) for b in body["bins"])
        test_total = sum(len(b["test"]) for b in body["bins"])
        assert train_total == test_total > 0

    def test_wrong_space_conflict(self, client):
        assert client.get("/api/clusters?space=nope").status_code == 409


class TestProjectionEndpoint:
    def test_covers_test_split(self, client):
        body = client.get("/api/projection").json()
        assert len(body) == 120
        assert {"id", "x", "y"} <= set(body[0])


class TestImages:
    def test_served_with_content_type(self, client, service_store):
        body = client.get("/api/instances?limit=200").json()
        served = client.get("/images/img-00000")
        assert served.status_code == 200
        assert served.headers["content-type"] == "image/png"
        assert served.content == PNG_1X1

    def test_missing_file(self, client):
        resp = client.get("/images/img-00119")
        assert resp.status_code == 404


class TestFindings:
    def test_post_and_journal(self, client, service_store):
        resp = client.post("/api/findings", json={
            "description": "test cluster wears sunglasses",
            "instance_ids": ["img-00000", "img-00001"],
        })
        assert resp.status_code == 201
        body = resp.json()
        assert body["description"] == "test cluster wears sunglasses"
        journal = (service_store / "findings.jsonl").read_text().strip()
        last = json.loads(journal.splitlines()[-1])
        assert last["instance_ids"] == ["img-00000", "img-00001"]
        assert "timestamp" in last

    def test_empty_description_rejected(self, client):
        resp = client.post("/api/findings", json={"description": "   "})
        assert resp.status_code == 400

    def test_unknown_instance_rejected(self, client):
        resp = client.post("/api/findings", json={
            "description": "x", "instance_ids": ["nope"],
        })
        assert resp.status_code == 404


class TestMissingArtifacts:
    def test_conflict_when_not_computed(self, tmp_path):
        train, test, _ = gaussian_shift_data(n_train=20, n_unshifted=15,
                                             n_shifted=5)
        records = make_records(len(train), len(test))
        manifest = tmp_path / "manifest.json"
        write_manifest_file(manifest, records)
        dsem = tmp_path / "imagenet.dsem"
        write_embeddings(dsem, np.vstack([train, test]).astype(np.float32))
        store_dir = tmp_path / "store"
        assert main(["ingest", "--manifest", str(manifest), "--embeddings",
                     str(dsem), "--space", "imagenet",
                     "--out", str(store_dir)]) == 0
        assert main(["score", "--store", str(store_dir), "--method", "center",
                     "--space", "imagenet"]) == 0
        client = TestClient(create_app(load_state(store_dir)))
        assert client.get("/api/clusters").status_code == 409
        assert client.get("/api/projection").status_code == 409
        # scored endpoints still work
        assert client.get("/api/instances").status_code == 200
