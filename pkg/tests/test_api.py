import time

import pytest
from fastapi.testclient import TestClient

from entropic.bench.data import synthetic_task, write_csv
from entropic.main import app


@pytest.fixture
def csv_path(tmp_path):
    return write_csv(synthetic_task(80, D=2, seed=3), tmp_path / "syn.csv")


def test_health():
    with TestClient(app) as client:
        r = client.get("/health")
        assert r.status_code == 200
        assert r.json()["ok"] is True


def test_start_with_missing_file(tmp_path):
    with TestClient(app) as client:
        r = client.post("/start", json={"data": str(tmp_path / "nope.csv"), "target": "y"})
        assert r.status_code == 400


def test_start_with_unknown_target(csv_path):
    with TestClient(app) as client:
        r = client.post("/start", json={"data": str(csv_path), "target": "missing"})
        assert r.status_code == 400
        assert "missing" in r.json()["detail"]


def test_benchmark_lifecycle(csv_path):
    with TestClient(app) as client:
        r = client.post("/start", json={"data": str(csv_path), "target": "y", "methods": ["eof", "rks"],
                                        "m": [5], "runs": 2, "concurrency": 2})
        assert r.status_code == 200
        assert r.json()["jobs"] == 4
        deadline = time.monotonic() + 30
        while time.monotonic() < deadline:
            status = client.get("/status").json()
            if status["open"] == 0:
                break
            time.sleep(0.05)
        assert status == {"total": 4, "done": 4, "failed": 0, "running": 0, "open": 0}
        results = client.get("/results").json()
        assert [(r["method"], r["M"], r["runs"]) for r in results] == [("eof", 5, 2), ("rks", 5, 2)]
        assert client.post("/stop").json() == {"status": "idle"}
