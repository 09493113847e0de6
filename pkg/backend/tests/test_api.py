"""
API Endpoint Tests
Tests for FastAPI routes
"""

import pytest
from fastapi.testclient import TestClient
import sys
import os

# Add project root to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..'))

from main import app

# Create test client
client = TestClient(app)

# Small run that keeps the endpoints fast
SMALL = {"levels": 2, "shots": 20, "seed": 1, "mc_samples": 1000, "grid_points": 1000}


class TestGeneralEndpoints:
    """Test general API endpoints"""

    def test_root_endpoint(self):
        """Test root endpoint returns API info"""
        response = client.get("/")
        assert response.status_code == 200
        data = response.json()
        assert "name" in data
        assert "version" in data
        assert data["status"] == "running"

    def test_health_check(self):
        """Test health check endpoint"""
        response = client.get("/health")
        assert response.status_code == 200
        data = response.json()
        assert data["status"] == "healthy"
        assert data["max_total_dim"] > 0
        assert "baseline" in data["presets"]


class TestPresetEndpoints:
    """Test preset lookup"""

    def test_get_preset(self):
        response = client.get("/presets/baseline")
        assert response.status_code == 200
        data = response.json()
        assert data["s0"] == 2.0
        assert data["strike"] == 1.7

    def test_wide_preset(self):
        data = client.get("/presets/wide").json()
        assert (data["s0"], data["sigma"], data["dim"]) == (3.0, 0.5, 10)

    def test_unknown_preset(self):
        """Test 404 for a preset that is not shipped"""
        response = client.get("/presets/nowhere")
        assert response.status_code == 404


class TestPriceEndpoint:
    """Test the pricing endpoint"""

    def test_price_small_run(self):
        response = client.post("/price", json=SMALL)
        assert response.status_code == 200
        report = response.json()
        assert report["oracle_calls"] == 20 * (1 + 3 + 5)
        assert report["seed"] == 1
        assert len(report["quantum"]["records"]) == 3
        assert report["estimates"]["analytic"] == pytest.approx(0.5165, abs=1e-3)

    def test_price_deterministic(self):
        first = client.post("/price", json=SMALL).json()
        second = client.post("/price", json=SMALL).json()
        assert first == second

    def test_strike_above_grid(self):
        """Test 400 when the strike sits above the top grid point"""
        response = client.post("/price", json={**SMALL, "strike": 10.0})
        assert response.status_code == 400
        assert "strike" in response.json()["detail"].lower()

    def test_invalid_volatility(self):
        """Test 422 for a negative volatility"""
        response = client.post("/price", json={**SMALL, "sigma": -1.0})
        assert response.status_code == 422

    def test_unknown_field(self):
        response = client.post("/price", json={**SMALL, "colour": "blue"})
        assert response.status_code == 422


class TestSweepEndpoint:
    """Test the dimension sweep endpoint"""

    def test_sweep_rows(self):
        response = client.post("/sweep-dim", json={**SMALL, "dims": [2, 3]})
        assert response.status_code == 200
        rows = response.json()
        assert [row["d"] for row in rows] == [2, 3]
        assert all(row["M"] == 180 for row in rows)

    def test_sweep_register_too_large(self):
        response = client.post("/sweep-dim", json={**SMALL, "dims": [2, 64], "qudits": 2})
        assert response.status_code == 422


class TestSimulationEndpoints:
    """Test the path and density endpoints"""

    def test_paths(self):
        response = client.post("/paths", json={"seed": 3, "n_paths": 2, "steps": 5})
        assert response.status_code == 200
        data = response.json()
        assert data["seed"] == 3
        assert data["columns"] == ["path_id", "t", "S_t"]
        assert len(data["rows"]) == 2 * 6
        assert data["rows"][0] == [0.0, 0.0, 2.0]

    def test_paths_seed_drawn(self):
        data = client.post("/paths", json={"n_paths": 1, "steps": 2}).json()
        assert isinstance(data["seed"], int)

    def test_pdf(self):
        response = client.post("/pdf", json={"curve_samples": 50})
        assert response.status_code == 200
        data = response.json()
        assert len(data["grid"]["rows"]) == 8
        assert len(data["curve"]["rows"]) == 50
        assert sum(row[2] for row in data["grid"]["rows"]) == pytest.approx(1.0, abs=1e-9)
