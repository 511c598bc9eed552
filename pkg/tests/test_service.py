import numpy as np
import pytest
from fastapi.testclient import TestClient

from gprfill.service.app import create_app


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app()) as c:
        yield c


def small_field(client, seed=3):
    response = client.post("/generate", json={
        "nx": 8, "ny": 8, "mean": 5, "sigma": 2, "nu": 0.5,
        "xi_x": 2, "xi_y": 2, "law": "gaussian", "n_modes": 100, "seed": seed,
    })
    assert response.status_code == 200
    return response.json()


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok"


def test_generate_shape_and_determinism(client):
    a = small_field(client)
    b = small_field(client)
    assert len(a["values"]) == 8 and len(a["values"][0]) == 8
    assert a["values"] == b["values"]
    assert a["provenance"]["seed"] == 3


def test_generate_validation_names_field(client):
    response = client.post("/generate", json={
        "nx": 8, "ny": 8, "mean": 5, "sigma": -1, "nu": 0.5,
        "xi_x": 2, "xi_y": 2,
    })
    assert response.status_code == 422
    assert any("sigma" in str(e.get("loc", ())) for e in response.json()["detail"])


def test_mask_endpoint(client):
    response = client.post("/mask", json={"nx": 8, "ny": 8, "kind": "thinning",
                                          "p": 25, "seed": 1})
    body = response.json()
    assert response.status_code == 200
    assert body["n_missing"] == 16  # floor(0.25 * 64)
    assert body["n_observed"] == 48
    flat = [v for row in body["mask"] for v in row]
    assert set(flat) <= {0, 1}


def test_mask_block_too_large(client):
    response = client.post("/mask", json={"nx": 8, "ny": 8, "kind": "block",
                                          "block_side": 9})
    assert response.status_code == 400
    assert "does not fit" in response.json()["detail"]


def test_predict_round_trip(client):
    field = small_field(client)["values"]
    mask = client.post("/mask", json={"nx": 8, "ny": 8, "kind": "thinning",
                                      "p": 25, "seed": 2}).json()["mask"]
    request = {
        "sample": field,
        "mask": mask,
        "params": {"temperature": 0.01},
        "schedule": {"burn_in": 20, "averaging": 20, "seed": 7},
    }
    a = client.post("/predict", json=request)
    assert a.status_code == 200
    body = a.json()
    assert body["n_predicted"] == 16
    assert len(body["energy_trace"]) == 40
    predicted = np.array([[np.nan if v is None else v for v in row]
                          for row in body["predicted"]])
    observed = np.array(mask, dtype=bool)
    assert np.isnan(predicted[observed]).all()
    assert np.isfinite(predicted[~observed]).all()
    assert body["z_min"] < body["z_max"]
    b = client.post("/predict", json=request)
    assert b.json()["predicted"] == body["predicted"]


def test_predict_mask_values_validated(client):
    field = small_field(client)["values"]
    bad_mask = [[2] * 8 for _ in range(8)]
    response = client.post("/predict", json={
        "sample": field, "mask": bad_mask, "params": {"temperature": 0.01},
    })
    assert response.status_code == 422


def test_predict_all_missing_rejected(client):
    field = small_field(client)["values"]
    response = client.post("/predict", json={
        "sample": field, "mask": [[0] * 8 for _ in range(8)],
        "params": {"temperature": 0.01},
    })
    assert response.status_code == 400


def test_predict_infinite_series_encoding(client):
    field = small_field(client)["values"]
    mask = client.post("/mask", json={"nx": 8, "ny": 8, "kind": "thinning",
                                      "p": 20, "seed": 5}).json()["mask"]
    response = client.post("/predict", json={
        "sample": field, "mask": mask,
        "params": {"temperature": 0.05, "n": None, "alpha": 2.0},
        "schedule": {"burn_in": 5, "averaging": 5, "seed": 1},
    })
    assert response.status_code == 200


def test_baseline_endpoint(client):
    field = small_field(client)["values"]
    mask = client.post("/mask", json={"nx": 8, "ny": 8, "kind": "block",
                                      "block_side": 3, "seed": 4}).json()["mask"]
    for method in ("smooth_inpaint", "cubic"):
        response = client.post("/baseline-bc", json={"sample": field, "mask": mask,
                                                     "bias_method": method})
        assert response.status_code == 200
        body = response.json()
        flat = [v for row in body["predicted"] for v in row if v is not None]
        assert len(flat) == 9


def test_histogram_endpoint(client):
    response = client.post("/histogram", json={
        "nx": 8, "ny": 8,
        "params": {"temperature": 0.1, "field_mode": "uniform", "field_coupling": 0.4},
        "schedule": {"burn_in": 20, "averaging": 30, "seed": 9},
        "bins": 12,
    })
    assert response.status_code == 200
    body = response.json()
    assert len(body["counts"]) == 12
    assert len(body["bin_edges"]) == 13
    assert sum(body["counts"]) == 30 * 64
    assert 0 <= body["mean_angle"] <= 2 * np.pi


def test_sweep_endpoint(client):
    config = {
        "data": {"nx": 8, "ny": 8, "mean": 5, "sigma": 2, "nu": 0.5,
                 "xi_x": 2, "xi_y": 2, "law": "gaussian", "n_modes": 100},
        "mask": {"kind": "thinning", "p": 25},
        "S": 2,
        "fixed_params": {"temperature": 0.05},
        "sweep_axes": [{"name": "T", "values": [0.05, 0.1]}],
        "schedule": {"burn_in": 5, "averaging": 5},
        "master_seed": 13,
        "workers": 1,
    }
    a = client.post("/sweep", json=config)
    assert a.status_code == 200
    body = a.json()
    assert body["axis_names"] == ["T"]
    assert len(body["rows"]) == 2
    assert len(body["rows"][0]["config_metrics"]) == 2
    assert len(body["rows"][0]["seeds"]) == 2
    assert "workers" not in body["config"]

    b = client.post("/sweep", json=config).json()
    assert b["rows"] == body["rows"]
    assert b["config_hash"] == body["config_hash"]


def test_sweep_rejects_three_axes(client):
    config = {
        "data": {"nx": 8, "ny": 8, "mean": 5, "sigma": 2, "nu": 0.5,
                 "xi_x": 2, "xi_y": 2},
        "mask": {"kind": "thinning", "p": 25},
        "S": 1,
        "fixed_params": {"temperature": 0.05},
        "sweep_axes": [{"name": "T", "values": [0.05]},
                       {"name": "J_nn", "values": [0.5]},
                       {"name": "J_fn", "values": [0.0]}],
        "master_seed": 1,
    }
    assert client.post("/sweep", json=config).status_code == 422


def test_metrics_endpoint(client):
    response = client.post("/metrics", json={"truth": [2, 4], "predicted": [1, 5]})
    assert response.json() == {"aae": 1.0, "are": 0.125, "aare": 0.375, "rase": 1.0}
    bad = client.post("/metrics", json={"truth": [0.0], "predicted": [1.0]})
    assert bad.status_code == 400
    assert "zero" in bad.json()["detail"]
