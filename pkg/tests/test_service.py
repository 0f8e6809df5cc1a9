"""HTTP service: endpoints, validation and library parity."""

import numpy as np
import pytest
from fastapi.testclient import TestClient

from conftest import random_features
from colmp import artifacts as art
from colmp.closed_form import EstimatorFamily, classify_fixed, estimate
from colmp.dataset import dataset_to_csv
from colmp.evaluation import separation_param
from colmp.fixtures import generate_fixture
from colmp.pipeline import linear_artifact, ova_artifact, train_mlr, train_ova
from colmp.service import Registry, create_app
from colmp.types import SectionShape

R = SectionShape.RECTANGULAR


def features_json(f):
    arr = f.as_array()
    return {"a_over_d": arr[0], "axial_ratio": arr[1], "rho_l": arr[2],
            "rho_t": arr[3], "s_over_d": arr[4], "vy_over_vo": arr[5]}


@pytest.fixture(scope="module")
def client(tmp_path_factory):
    """Service over a registry with one trained artifact and stats."""
    tmp = tmp_path_factory.mktemp("svc")
    ds = generate_fixture(seed=7, n_rect=60, n_circ=40)
    (tmp / "mlr-R-a.json").write_bytes(
        art.save_model(linear_artifact(train_mlr(ds, R, "a", seed=0),
                                       R, "a")))
    (tmp / "ova-R.json").write_bytes(
        art.save_model(ova_artifact(train_ova(ds, R, seed=0, iters=100), R)))
    csv_path = tmp / "ds.csv"
    csv_path.write_text(dataset_to_csv(ds), encoding="utf-8")
    registry = Registry.load(models_dir=str(tmp), dataset_path=str(csv_path))
    return TestClient(create_app(registry))


@pytest.fixture(scope="module")
def bare_client():
    """Service with no artifacts and no dataset statistics."""
    return TestClient(create_app(Registry(predictors={}, stats={})))


class TestBasics:
    def test_health(self, bare_client):
        r = bare_client.get("/api/v1/health")
        assert r.status_code == 200
        assert r.json()["status"] == "ok"

    def test_models_closed_form_always_present(self, bare_client):
        names = [m["name"] for m in
                 bare_client.get("/api/v1/models").json()["models"]]
        assert names == ["gm", "mlr", "prm", "rlr"]

    def test_models_include_artifacts(self, client):
        entries = client.get("/api/v1/models").json()["models"]
        by_name = {m["name"]: m for m in entries}
        assert by_name["mlr-R-a"]["kind"] == "artifact"
        assert by_name["mlr-R-a"]["target"] == "a"
        assert by_name["ova-R"]["model_type"] == "ova"


class TestPredict:
    def test_worked_example(self, bare_client):
        body = {"shape": "R",
                "features": {"a_over_d": 3.0, "axial_ratio": 0.2,
                             "rho_l": 0.02, "rho_t": 0.01, "s_over_d": 0.5,
                             "vy_over_vo": 0.8},
                "models": ["gm"], "id": "req-1"}
        r = bare_client.post("/api/v1/predict", json=body)
        assert r.status_code == 200
        doc = r.json()
        assert doc["id"] == "req-1"
        gm = doc["estimates"]["gm"]
        assert gm["a"] == pytest.approx(0.01563, abs=1e-12)
        assert gm["b"] == pytest.approx(0.0354, abs=1e-12)

    def test_classification_block_present(self, bare_client):
        body = {"shape": "R",
                "features": {"a_over_d": 3.0, "axial_ratio": 0.0,
                             "rho_l": 0.0, "rho_t": 0.0, "s_over_d": 0.5,
                             "vy_over_vo": 0.0}}
        doc = bare_client.post("/api/v1/predict", json=body).json()
        assert doc["classification"]["mode"] == "FC"
        assert doc["classification"]["scores"]["FC"] == pytest.approx(6.94)

    def test_unknown_model_400(self, bare_client):
        body = {"shape": "R", "features": features_json(
            random_features(np.random.default_rng(0))), "models": ["xyz"]}
        r = bare_client.post("/api/v1/predict", json=body)
        assert r.status_code == 400
        assert r.json()["detail"]["error"] == "UnknownModel"

    def test_invalid_features_400(self, bare_client):
        body = {"shape": "R",
                "features": {"a_over_d": 3.0, "axial_ratio": -0.5,
                             "rho_l": 0.0, "rho_t": 0.0, "s_over_d": 0.5,
                             "vy_over_vo": 0.0}}
        r = bare_client.post("/api/v1/predict", json=body)
        assert r.status_code == 400
        assert r.json()["detail"]["error"] == "InvalidFeatures"

    def test_trained_artifact_served(self, client):
        f = random_features(np.random.default_rng(1))
        body = {"shape": "R", "features": features_json(f),
                "models": ["mlr-R-a"]}
        doc = client.post("/api/v1/predict", json=body).json()
        entry = doc["estimates"]["mlr-R-a"]
        assert entry["target"] == "a"
        assert entry["b"] is None
        assert entry["a"] == max(entry["raw_a"], 0.0)

    def test_artifact_shape_mismatch_400(self, client):
        f = random_features(np.random.default_rng(2))
        body = {"shape": "C", "features": features_json(f),
                "models": ["mlr-R-a"]}
        r = client.post("/api/v1/predict", json=body)
        assert r.status_code == 400

    def test_x_test_present_with_stats(self, client):
        ds = generate_fixture(seed=7, n_rect=60, n_circ=40)
        f = ds.records[0].features
        body = {"shape": "R", "features": features_json(f), "models": []}
        doc = client.post("/api/v1/predict", json=body).json()
        expected = separation_param(f, ds.stats(R))
        assert doc["x_test"] == pytest.approx(expected, abs=1e-12)

    def test_x_test_null_without_stats(self, bare_client):
        f = random_features(np.random.default_rng(3))
        body = {"shape": "R", "features": features_json(f), "models": []}
        doc = bare_client.post("/api/v1/predict", json=body).json()
        assert doc["x_test"] is None


class TestClassify:
    def test_fixed_classifier(self, bare_client):
        body = {"shape": "C",
                "features": {"a_over_d": 3.0, "axial_ratio": 0.3,
                             "rho_l": 0.02, "rho_t": 0.01, "s_over_d": 0.5,
                             "vy_over_vo": 1.2}}
        doc = bare_client.post("/api/v1/classify", json=body).json()
        assert doc["classification"]["mode"] == "SC"

    def test_trained_classifier(self, client):
        f = random_features(np.random.default_rng(4))
        body = {"shape": "R", "features": features_json(f),
                "model": "ova-R"}
        r = client.post("/api/v1/classify", json=body)
        assert r.status_code == 200
        assert r.json()["classification"]["mode"] in ("FC", "FSC", "SC")

    def test_unknown_classifier_400(self, client):
        f = random_features(np.random.default_rng(5))
        body = {"shape": "R", "features": features_json(f),
                "model": "mlr-R-a"}  # estimator, not classifier
        assert client.post("/api/v1/classify", json=body).status_code == 400


class TestParity:
    def test_responses_match_library_exactly(self, bare_client):
        """Round-tripped JSON numbers equal direct library calls."""
        rng = np.random.default_rng(99)
        for _ in range(25):
            f = random_features(rng)
            shape = SectionShape.RECTANGULAR if rng.random() < 0.5 \
                else SectionShape.CIRCULAR
            body = {"shape": shape.value, "features": features_json(f),
                    "models": ["gm", "mlr", "prm", "rlr"]}
            doc = bare_client.post("/api/v1/predict", json=body).json()
            for family in EstimatorFamily:
                e = estimate(family, f, shape)
                got = doc["estimates"][family.value]
                assert abs(got["a"] - e.a) <= 1e-12
                assert abs(got["b"] - e.b) <= 1e-12
                assert abs(got["raw_a"] - e.raw_a) <= 1e-12
                assert abs(got["raw_b"] - e.raw_b) <= 1e-12
            cs = classify_fixed(f, shape)
            got = doc["classification"]
            assert got["mode"] == cs.predicted.value
            assert abs(got["scores"]["FSC"] - cs.score_fsc) <= 1e-12
            assert abs(got["probabilities"]["SC"] - cs.prob_sc) <= 1e-12

    def test_repeated_requests_identical(self, client):
        f = random_features(np.random.default_rng(6))
        body = {"shape": "R", "features": features_json(f),
                "models": ["gm", "mlr-R-a"]}
        r1 = client.post("/api/v1/predict", json=body)
        r2 = client.post("/api/v1/predict", json=body)
        assert r1.content == r2.content
