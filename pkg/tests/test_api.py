import csv
import json

import pytest
from fastapi.testclient import TestClient

from transitsurvey import build_snapshot, create_app, SnapshotError
from transitsurvey.cli import main


@pytest.fixture(scope="module")
def served(tmp_path_factory):
    """Full pipeline on the six-rider fixture, plus a test client."""
    from conftest import T1_LINES_CSV, T1_RIDES_JSONL, T1_STOPS_CSV

    tmp = tmp_path_factory.mktemp("api")
    files = {
        "stops": tmp / "stops.csv",
        "lines": tmp / "lines.csv",
        "rides": tmp / "rides.jsonl",
    }
    files["stops"].write_text(T1_STOPS_CSV)
    files["lines"].write_text(T1_LINES_CSV)
    files["rides"].write_text(T1_RIDES_JSONL)
    out = tmp / "out"
    args = [
        "--stops", str(files["stops"]), "--lines", str(files["lines"]),
        "--rides", str(files["rides"]), "--mode", "planar",
        "--lambda", "2.0", "--criterion", "distance", "--min-sample", "1",
        "--out", str(out), "--seed", "9", "--top-n", "3",
    ]
    assert main(["all", *args]) == 0
    snapshot = build_snapshot(out)
    return out, snapshot, TestClient(create_app(snapshot))


def test_meta(served):
    _, snapshot, client = served
    body = client.get("/api/v1/meta").json()
    assert body["counts"] == {"stops": 6, "lines": 3, "rides": 6}
    assert body["config"]["lambda"] == 2.0
    assert body["seed"] == 9


def test_heat_equals_cli_ranking(served):
    out, _, client = served
    resp = client.get("/api/v1/stops/heat",
                      params={"lambda": 2.0, "criterion": "distance", "min_sample": 1})
    assert resp.status_code == 200
    heat = resp.json()
    with open(out / "ranking.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(heat) == len(rows)
    for got, want in zip(heat, rows):
        assert got["stop_id"] == want["stop_id"]
        assert got["Qr"] == int(want["Qr"])
        assert got["Qb"] == int(want["Qb"])
        assert f"{got['p']:.6f}" == want["probability"]


@pytest.mark.parametrize("lam,expect_unsat", [(0.0, 6), (1.0, 3), (2.0, 3), (2.5, 0)])
def test_heat_lambda_sweep(served, lam, expect_unsat):
    _, _, client = served
    heat = client.get(
        "/api/v1/stops/heat",
        params={"lambda": lam, "criterion": "distance", "min_sample": 1},
    ).json()
    assert sum(h["Qr"] for h in heat) == expect_unsat


def test_heat_huge_lambda_zero_everywhere(served):
    _, _, client = served
    heat = client.get(
        "/api/v1/stops/heat",
        params={"lambda": 1e9, "criterion": "distance", "min_sample": 1},
    ).json()
    assert all(h["Qr"] == 0 for h in heat)


def test_stop_riders_sorted_by_gap(served):
    _, _, client = served
    body = client.get("/api/v1/stops/A/riders",
                      params={"lambda": 2.0, "criterion": "distance"}).json()
    gaps = [r["gap"] for r in body]
    assert gaps == sorted(gaps, reverse=True)
    assert {r["rider_id"] for r in body} == {"r1", "r2", "r3", "r4", "r6"}
    assert all(r["unsatisfied"] == (r["gap"] >= 2.0) for r in body)


def test_compare_payload(served):
    _, _, client = served
    body = client.get("/api/v1/riders/r1/compare").json()
    assert body["origin"] == "A" and body["destination"] == "D"
    assert body["real"]["metrics"]["distance_km"] == pytest.approx(5.0)
    assert body["optimal"]["distance"]["metrics"]["distance_km"] == pytest.approx(3.0)
    assert set(body["polygons"]) == {"real", "distance", "time", "transfers", "hops"}
    # the ridden route IS the hops optimum: identical polygons
    assert body["polygons"]["real"]["vertices"] == body["polygons"]["hops"]["vertices"]
    vertices = body["polygons"]["real"]["vertices"]
    d, t, x, h = body["polygons"]["real"]["normalized"]
    assert vertices == [[d, 0.0], [0.0, t], [-x, 0.0], [0.0, -h]]


def test_report_for_unsatisfied_rider(served):
    _, _, client = served
    resp = client.get("/api/v1/riders/r1/report", params={"lambda": 2.0})
    assert resp.status_code == 200
    body = resp.json()
    assert body["criterion"] == "distance"
    assert body["difference"] == pytest.approx(2.0)


def test_report_404_for_satisfied_rider(served):
    _, _, client = served
    resp = client.get("/api/v1/riders/r2/report", params={"lambda": 2.0})
    assert resp.status_code == 404


def test_unknown_resources_404(served):
    _, _, client = served
    assert client.get("/api/v1/riders/nobody/compare").status_code == 404
    assert client.get("/api/v1/stops/ZZ/riders").status_code == 404
    assert client.get("/api/v1/simulate").status_code == 404


def test_bad_parameters_400(served):
    _, _, client = served
    assert client.get("/api/v1/stops/heat", params={"lambda": -1}).status_code == 400
    assert client.get("/api/v1/stops/heat", params={"criterion": "speed"}).status_code == 400
    assert client.get("/api/v1/stops/heat", params={"min_sample": -2}).status_code == 422


def test_default_lambda_comes_from_run(served):
    _, _, client = served
    explicit = client.get("/api/v1/stops/heat",
                          params={"lambda": 2.0, "criterion": "distance"}).json()
    default = client.get("/api/v1/stops/heat", params={"criterion": "distance"}).json()
    assert explicit == default


def test_concurrent_identical_requests_identical(served):
    _, _, client = served
    bodies = {client.get("/api/v1/stops/heat").text for _ in range(5)}
    assert len(bodies) == 1


def test_snapshot_missing_stage_named(tmp_path):
    with pytest.raises(SnapshotError, match="ingest"):
        build_snapshot(tmp_path)


def test_simulate_endpoint_serves_attached_results(served, tmp_path):
    out, _, _ = served
    scen = out / "scenarios.csv"
    scen.write_text(
        "stop_count,method,lambda,probability,trials\n"
        "5,targeted,0.5,0.800000,\n5,random,0.5,0.200000,25\n"
    )
    try:
        snapshot = build_snapshot(out)
        client = TestClient(create_app(snapshot))
        body = client.get("/api/v1/simulate").json()
        assert len(body) == 2 and body[0]["method"] == "targeted"
    finally:
        scen.unlink()
