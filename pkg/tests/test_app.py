import pytest
from fastapi.testclient import TestClient

from predsearch.app import app, state
from predsearch.learning.gnn import GnnModel
from tests.conftest import TWO_VAR_MPS

INFEASIBLE_MPS = TWO_VAR_MPS.replace(" L  C1", " G  C1").replace("RHS  C1  1", "RHS  C1  3")


@pytest.fixture
def client():
    with TestClient(app) as c:
        yield c


class TestApi:
    def test_health(self, client):
        body = client.get("/health").json()
        assert body["status"] == "ok"
        assert "model_loaded" in body

    def test_solve(self, client):
        resp = client.post("/solve", json={"mps": TWO_VAR_MPS, "params": {"time_limit": 5}})
        assert resp.status_code == 200
        body = resp.json()
        assert body["objective"] == -1.0
        assert body["result"]["status"] == "optimal"

    def test_solve_infeasible(self, client):
        body = client.post("/solve", json={"mps": INFEASIBLE_MPS}).json()
        assert body["result"]["status"] == "infeasible"
        assert body["objective"] is None
        assert body["result"]["bound"] == float("inf")

    def test_bad_mps(self, client):
        resp = client.post("/solve", json={"mps": "NAME x\nROWS\n N OBJ\n"})
        assert resp.status_code == 422
        assert "ENDATA" in resp.json()["detail"]

    def test_featurize(self, client):
        body = client.post("/featurize", json={"mps": TWO_VAR_MPS}).json()
        assert body["q"] == 2
        assert body["con_feats"][0][2] == pytest.approx(0.5)

    def test_search_needs_model(self, client):
        state["model"] = None
        assert client.post("/search", json={"mps": TWO_VAR_MPS}).status_code == 503

    def test_search(self, client):
        state["model"] = GnnModel.init(hidden_dim=8, seed=0)
        resp = client.post("/search", json={"mps": TWO_VAR_MPS,
                                            "config": {"k0": 1, "k1": 0, "delta": 1, "time_limit": 5}})
        assert resp.status_code == 200
        body = resp.json()
        assert body["objective"] == -1.0
        assert len(body["partial"]["i0"]) == 1

    def test_search_too_many_pins(self, client):
        state["model"] = GnnModel.init(hidden_dim=8, seed=0)
        resp = client.post("/search", json={"mps": TWO_VAR_MPS, "config": {"k0": 2, "k1": 1}})
        assert resp.status_code == 422
