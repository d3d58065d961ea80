import pytest
from fastapi.testclient import TestClient

import api.main as api_main


@pytest.fixture
def client(tmp_path, monkeypatch):
    monkeypatch.setattr(api_main, "SESSION_DIR", tmp_path)
    return TestClient(api_main.app)


@pytest.fixture
def session_id(client):
    body = {
        "space": {"continuous": [[0.0, 1.0]], "categorical": [3]},
        "config": {"n_init": 4, "epochs": 1, "ga": {"population_size": 4, "generations": 1}},
    }
    response = client.post("/api/sessions", json=body)
    assert response.status_code == 200
    return response.json()["session_id"]


def _values(points):
    return [[p["continuous"][0], float(p["categorical"][0])] for p in points]


class TestService:
    """Test service metadata endpoints"""

    def test_root(self, client):
        """Test root"""
        data = client.get("/").json()
        assert data["message"] == "MixMOBO API"
        assert "ask" in data["endpoints"]

    def test_health(self, client):
        """Test health"""
        assert client.get("/health").json()["status"] == "healthy"


class TestSessions:
    """Test the ask/tell session endpoints"""

    def test_create(self, client, session_id):
        """Test create"""
        status = client.get(f"/api/sessions/{session_id}").json()
        assert status["evaluations"] == 0
        assert status["epochs"] == 1
        assert not status["finished"]

    def test_invalid_space(self, client):
        """Test invalid space"""
        response = client.post("/api/sessions", json={"space": {"categorical": [1]}})
        assert response.status_code == 400

    def test_invalid_config(self, client):
        """Test invalid config"""
        body = {"space": {"categorical": [3]}, "config": {"portfolio": ["EI"]}}
        assert client.post("/api/sessions", json=body).status_code == 400

    def test_full_cycle(self, client, session_id):
        """Test full cycle"""
        points = client.post(f"/api/sessions/{session_id}/ask").json()["points"]
        assert len(points) == 4
        status = client.post(
            f"/api/sessions/{session_id}/tell", json={"values": _values(points)}
        ).json()
        assert status["evaluations"] == 4

        batch = client.post(f"/api/sessions/{session_id}/ask").json()["points"]
        assert len(batch) == 1
        response = client.post(
            f"/api/sessions/{session_id}/tell", json={"points": batch, "values": _values(batch)}
        )
        assert response.json()["finished"]

        result = client.get(f"/api/sessions/{session_id}/result").json()
        assert len(result["points"]) == len(result["values"]) >= 1

    def test_double_ask_conflicts(self, client, session_id):
        """Test double ask conflicts"""
        client.post(f"/api/sessions/{session_id}/ask")
        assert client.post(f"/api/sessions/{session_id}/ask").status_code == 409

    def test_tell_without_ask_conflicts(self, client, session_id):
        """Test tell without ask conflicts"""
        response = client.post(f"/api/sessions/{session_id}/tell", json={"values": [[0.0, 0.0]]})
        assert response.status_code == 409

    def test_wrong_value_rows(self, client, session_id):
        """Test wrong value rows"""
        client.post(f"/api/sessions/{session_id}/ask")
        response = client.post(f"/api/sessions/{session_id}/tell", json={"values": [[0.0, 0.0]]})
        assert response.status_code == 400

    def test_result_before_observations(self, client, session_id):
        """Test result before observations"""
        assert client.get(f"/api/sessions/{session_id}/result").status_code == 409

    def test_unknown_session(self, client):
        """Test unknown session"""
        assert client.get("/api/sessions/doesnotexist").status_code == 404
        assert client.post("/api/sessions/bad-id/ask").status_code == 404


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
