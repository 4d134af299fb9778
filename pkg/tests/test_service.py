"""HTTP service: endpoint shapes, error mapping, and run reproducibility
through the JSON layer."""

import warnings

import numpy as np
import pytest

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    from fastapi.testclient import TestClient

from gradsamp import Status, default_params, make_problem, solve
from gradsamp.service import app
from gradsamp.service.app import default_start


@pytest.fixture(scope="module")
def client():
    with TestClient(app, raise_server_exceptions=False) as c:
        yield c


def test_health(client):
    r = client.get("/health")
    assert r.status_code == 200
    body = r.json()
    assert body["status"] == "ok"
    assert isinstance(body["version"], str) and body["version"]


def test_problem_listing(client):
    r = client.get("/problems")
    assert r.status_code == 200
    rows = {row["name"]: row for row in r.json()}
    assert set(rows) == {"helou2d", "l1", "maxq", "smooth_quad", "dirlip1d", "sd_stall"}
    h = rows["helou2d"]
    assert h["dim"] == 2
    assert h["parametric_dim"] is False
    assert h["f_star"] == -33.0
    assert h["experimental"] is False
    assert h["has_default_x0"] is True
    assert rows["l1"]["parametric_dim"] is True
    assert rows["l1"]["has_default_x0"] is False
    assert rows["dirlip1d"]["experimental"] is True


def test_solve_response_shape(client):
    r = client.post(
        "/solve",
        json={"problem": "l1", "dim": 2, "x0": [0.9, -0.4], "seed": 7},
    )
    assert r.status_code == 200
    body = r.json()
    assert body["status"] == "ToleranceMet"
    assert len(body["x_final"]) == 2
    assert body["f_final"] <= 1e-5
    cert = body["certificate"]
    assert cert["g_norm"] <= 1e-6 and cert["epsilon"] <= 1e-6
    assert body["iterations"] == len(body["trace"])
    first = body["trace"][0]
    assert list(first)[:4] == ["k", "x", "f_x", "grad_x"]
    assert first["x"] == [0.9, -0.4]


def test_solve_without_trace(client):
    r = client.post(
        "/solve",
        json={"problem": "l1", "dim": 2, "x0": [0.9, -0.4], "include_trace": False},
    )
    assert r.status_code == 200
    body = r.json()
    assert "trace" not in body
    assert body["iterations"] > 0


def test_solve_matches_direct_library_call(client):
    prob = make_problem("maxq", 3)
    x0 = np.array([1.0, -2.0, 0.5])
    direct = solve(prob.oracle, x0, default_params(x0, seed=11))
    r = client.post(
        "/solve",
        json={"problem": "maxq", "dim": 3, "x0": [1.0, -2.0, 0.5], "seed": 11},
    )
    body = r.json()
    assert body["status"] == direct.status.value
    assert body["f_final"] == float(direct.f_final)
    assert body["x_final"] == [float(v) for v in direct.x_final]
    assert body["iterations"] == direct.iterations


def test_solve_default_start_uses_problem_default(client):
    # helou2d carries its own start point; two requests without x0 agree
    a = client.post("/solve", json={"problem": "sd_stall", "seed": 1}).json()
    b = client.post("/solve", json={"problem": "sd_stall", "seed": 1}).json()
    assert a == b
    assert a["trace"][0]["x"] == [0.0, 0.1]


def test_solve_default_start_draws_from_seed_stream(client):
    prob = make_problem("l1", 3)
    expect = default_start(prob, 5)
    r = client.post(
        "/solve", json={"problem": "l1", "dim": 3, "seed": 5, "include_trace": True}
    )
    assert r.json()["trace"][0]["x"] == [float(v) for v in expect]
    # different seeds start elsewhere
    r2 = client.post(
        "/solve", json={"problem": "l1", "dim": 3, "seed": 6, "include_trace": True}
    )
    assert r2.json()["trace"][0]["x"] != r.json()["trace"][0]["x"]


def test_solve_unknown_problem_404_with_known_list(client):
    r = client.post("/solve", json={"problem": "nosuch"})
    assert r.status_code == 404
    body = r.json()
    assert "nosuch" in body["detail"]
    assert set(body["known"]) == {
        "helou2d", "l1", "maxq", "smooth_quad", "dirlip1d", "sd_stall"
    }


def test_solve_unknown_variant_404_with_known_list(client):
    r = client.post("/solve", json={"problem": "l1", "dim": 2, "variant": "newton"})
    assert r.status_code == 404
    body = r.json()
    assert "newton" in body["detail"]
    assert "adaptive" in body["known"] and "fixed" in body["known"]


def test_solve_variant_alias_accepted(client):
    r = client.post(
        "/solve",
        json={"problem": "l1", "dim": 2, "x0": [0.9, -0.4], "variant": "trust_region"},
    )
    assert r.status_code == 200


def test_solve_invalid_params_400_with_violations(client):
    r = client.post(
        "/solve",
        json={"problem": "l1", "dim": 2, "x0": [0.9, -0.4], "params": {"beta": 2.0}},
    )
    assert r.status_code == 400
    body = r.json()
    assert body["detail"] == "invalid parameters"
    assert any("beta" in v for v in body["violations"])


def test_solve_wrong_x0_length_400(client):
    r = client.post("/solve", json={"problem": "l1", "dim": 2, "x0": [1.0, 2.0, 3.0]})
    assert r.status_code == 400
    assert "length 2" in r.json()["detail"]


def test_solve_malformed_body_422(client):
    r = client.post("/solve", json={"problem": "l1", "dim": 2, "x0": "zero"})
    assert r.status_code == 422


def test_solve_requires_exactly_one_problem_source(client):
    assert client.post("/solve", json={}).status_code == 400
    both = {
        "problem": "l1",
        "custom": {
            "name": "c", "dim": 1,
            "pieces": [{"b": [1.0]}, {"b": [-1.0]}],
        },
    }
    assert client.post("/solve", json=both).status_code == 400


def test_solve_custom_problem(client):
    # |x| as the max of two linear pieces
    r = client.post(
        "/solve",
        json={
            "custom": {
                "name": "absval", "dim": 1,
                "pieces": [{"b": [1.0]}, {"b": [-1.0]}],
            },
            "x0": [0.7],
            "seed": 2,
        },
    )
    assert r.status_code == 200
    body = r.json()
    assert body["status"] == "ToleranceMet"
    assert abs(body["f_final"]) <= 1e-5


def test_solve_custom_problem_bad_pieces_400(client):
    r = client.post(
        "/solve",
        json={
            "custom": {"name": "bad", "dim": 2, "pieces": [{"b": [1.0]}]},
            "x0": [0.0, 0.0],
        },
    )
    assert r.status_code == 400


def test_solve_hard_failure_500_with_partial_trace(client):
    r = client.post(
        "/solve",
        json={
            "problem": "helou2d",
            "seed": 1,
            "force_center_only_bundle": True,
        },
    )
    assert r.status_code == 500
    body = r.json()
    assert body["detail"]
    partial = body["partial_trace"]
    assert len(partial) >= 100
    assert partial[0]["x"] == [10.0, 10.0]
    assert partial[0]["perturbed"] is True


def test_compare_rows_and_medians(client):
    r = client.post(
        "/compare",
        json={
            "problem": "l1", "dim": 2,
            "variants": ["fixed", "adaptive"],
            "seeds": [1, 2, 3],
        },
    )
    assert r.status_code == 200
    body = r.json()
    rows = body["rows"]
    assert len(rows) == 6
    assert {(r["variant"], r["seed"]) for r in rows} == {
        (v, s) for v in ("fixed", "adaptive") for s in (1, 2, 3)
    }
    for row in rows:
        assert row["status"] == "ToleranceMet"
        assert row["n_gevals"] > 0 and row["n_fevals"] >= row["n_gevals"]
    medians = {m["variant"]: m for m in body["medians"]}
    assert set(medians) == {"fixed", "adaptive"}
    for name in medians:
        per_seed = sorted(r["n_gevals"] for r in rows if r["variant"] == name)
        assert medians[name]["n_gevals"] == per_seed[1]
        assert medians[name]["status"] == "ToleranceMet"


def test_compare_respects_budget(client):
    r = client.post(
        "/compare",
        json={
            "problem": "l1", "dim": 2,
            "variants": ["fixed", "trust"],
            "seeds": [1],
            "budget": 3,
        },
    )
    assert r.status_code == 200
    for row in r.json()["rows"]:
        assert row["iterations"] <= 4
        assert row["status"] == "MaxIterations"


def test_compare_needs_two_variants_and_a_seed(client):
    r = client.post(
        "/compare",
        json={"problem": "l1", "dim": 2, "variants": ["fixed"], "seeds": [1]},
    )
    assert r.status_code == 400
    r = client.post(
        "/compare",
        json={"problem": "l1", "dim": 2, "variants": ["fixed", "trust"], "seeds": []},
    )
    assert r.status_code == 400


def test_compare_unknown_variant_404(client):
    r = client.post(
        "/compare",
        json={"problem": "l1", "dim": 2, "variants": ["fixed", "newton"], "seeds": [1]},
    )
    assert r.status_code == 404
