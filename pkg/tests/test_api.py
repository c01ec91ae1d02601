import pytest
from fastapi.testclient import TestClient

import app.main as api_module
from app.known_states import BELL, MAX_MAGIC_SEED
from app.schemas import StateFile
from app.states import random_state


def _payload(state) -> dict:
    return StateFile.from_state(state).model_dump(exclude_none=True, exclude={"renormalize"})


@pytest.fixture
def client(catalog_dir, monkeypatch):
    monkeypatch.setattr(api_module, "CATALOG_DIR", str(catalog_dir))
    with TestClient(api_module.app) as test_client:
        yield test_client


@pytest.fixture
def client_without_catalog(tmp_path, monkeypatch):
    monkeypatch.setattr(api_module, "CATALOG_DIR", str(tmp_path / "vacio"))
    with TestClient(api_module.app) as test_client:
        yield test_client


def test_status(client):
    body = client.get("/status").json()
    assert body["catalog_status"] == "cargado"
    assert body["catalog_counts"]["magic2q"] == 480


def test_sre_endpoint(client):
    response = client.post("/sre", json={"state": _payload(MAX_MAGIC_SEED), "alpha": 2, "exact": True})
    assert response.status_code == 200
    assert response.json()["xi_exact"] == "7/16"


def test_domain_errors_are_422(client):
    response = client.post("/sre", json={"state": _payload(MAX_MAGIC_SEED), "alpha": 1})
    assert response.status_code == 422
    assert response.json()["error"] == "InvalidAlpha"
    bad_state = {"dim": 2, "amplitudes": [[1, 0], [1, 0]]}
    assert client.post("/concurrence", json={"state": bad_state}).status_code == 422


def test_concurrence_endpoint(client):
    body = client.post("/concurrence", json={"state": _payload(BELL)}).json()
    assert body["value"] == pytest.approx(1.0)
    assert body["value_squared"] is None


def test_catalog_lookup(client, rng):
    found = client.post("/catalog/lookup", json={"state": _payload(MAX_MAGIC_SEED)})
    assert found.status_code == 200
    assert found.json()["kind"] == "magic2q"
    assert found.json()["xi2"] == "7/16"
    missing = client.post("/catalog/lookup", json={"state": _payload(random_state(4, rng))})
    assert missing.status_code == 404


def test_lookup_without_catalog(client_without_catalog):
    response = client_without_catalog.post("/catalog/lookup", json={"state": _payload(MAX_MAGIC_SEED)})
    assert response.status_code == 503
