"""HTTP 接口"""
import pytest
from fastapi.testclient import TestClient

from module.codec import decode_tuple, encode_tuple
from module.coset_space import equivalent


@pytest.fixture
def client(fresh_config, monkeypatch):
    monkeypatch.setenv("PI_SEED", "7")
    from app import create_app
    return TestClient(create_app())


@pytest.fixture
def unseeded_client(fresh_config, monkeypatch):
    monkeypatch.delenv("PI_SEED", raising=False)
    from app import create_app
    return TestClient(create_app())


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json()["status"] == "ok"


def test_zeta_then_reconstruct(client, tuples):
    originals = tuples(5, 3)
    response = client.post("/api/zeta", json={"tuples": [encode_tuple(t) for t in originals]})
    assert response.status_code == 200
    forms = response.json()["forms"]
    assert all(f["sheet"] in (-1, 1) for f in forms)
    response = client.post("/api/reconstruct", json={"forms": forms})
    assert response.status_code == 200
    for t, record in zip(originals, response.json()["tuples"]):
        assert equivalent(decode_tuple(record), t)


def test_canonicalize(client, tuples):
    t = tuples(4)[0]
    response = client.post("/api/canonicalize", json={"tuples": [encode_tuple(t)]})
    assert response.status_code == 200
    assert equivalent(decode_tuple(response.json()["tuples"][0]), t)


def test_bad_record_is_rejected(client):
    response = client.post("/api/zeta", json={"tuples": [{"n": 3, "elements": [[1, 0, 0, 0]]}]})
    assert response.status_code == 400
    assert response.json()["exit_code"] == 2


def test_act(client, tuples):
    t = tuples(5)[0]
    forms = client.post("/api/zeta", json={"tuples": [encode_tuple(t)]}).json()["forms"]
    response = client.post("/api/act", json={"word": "s2 lmul:3,4", "tuples": [encode_tuple(t)], "forms": forms, "branch": "oracle"})
    assert response.status_code == 200
    body = response.json()
    moved = client.post("/api/zeta", json={"tuples": body["tuples"]}).json()["forms"][0]
    assert body["forms"][0]["sheet"] == moved["sheet"]
    assert max(abs(a - b) for a, b in zip(body["forms"][0]["upper"], moved["upper"])) < 1e-8


def test_act_errors(client, tuples):
    t = encode_tuple(tuples(4)[0])
    assert client.post("/api/act", json={"word": "s1", "tuples": [t], "branch": "guess"}).status_code == 422
    response = client.post("/api/act", json={"word": "qzx", "tuples": [t]})
    assert response.status_code == 400
    assert response.json()["exit_code"] == 2
    assert client.post("/api/act", json={"word": "s5", "tuples": [t]}).status_code == 400


def test_suites(client):
    names = {s["name"] for s in client.get("/api/suites").json()["suites"]}
    assert {"actions-oracle", "haar-n3", "polygon-pure"} <= names


def test_verify(client):
    response = client.post("/api/verify/kernel", json={"params": {"trials": 3}})
    assert response.status_code == 200
    assert response.json()["passed"] is True
    assert client.post("/api/verify/nope", json={"params": {}}).status_code == 404
    response = client.post("/api/verify/haar-n3", json={"params": {"samples": 100}})
    assert response.status_code == 400
    assert response.json()["exit_code"] == 2


def test_verify_needs_seed(unseeded_client):
    assert unseeded_client.post("/api/verify/kernel", json={"params": {}}).status_code == 422
    assert unseeded_client.post("/api/verify/kernel", json={"params": {"seed": 1, "trials": 2}}).status_code == 200
