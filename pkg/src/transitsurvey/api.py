"""Read-only HTTP service over one analysis snapshot.

The snapshot carries per-rider criterion gaps precomputed by the batch
pipeline, so any satisfaction threshold can be answered by a cheap
re-aggregation without touching route search again.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

from .ingest import Network
from .preference import AXES, KiviatPolygon, normalize_metrics
from .quality import (
    LAMBDA_UNITS,
    build_survey_report,
    heat_from_gaps,
)
from .routing import (
    Objective,
    Route,
    RouteMetrics,
    metrics_from_dict,
    route_from_dict,
)

# Artifact names shared between the batch pipeline and the service.
F_NETWORK = "network.json"
F_GRAPH = "graph.json"
F_LINK_TIMES = "link_times.json"
F_RIDES = "rides_valid.jsonl"
F_INGEST_SUMMARY = "ingest_summary.json"
F_ROUTES = "routes.jsonl"
F_PREFERENCES = "preferences.csv"
F_VERDICTS = "verdicts.csv"
F_RUN_META = "run_meta.json"
F_RANKING = "ranking.csv"
F_SCENARIOS = "scenarios.csv"

_STAGE_OF = {
    F_NETWORK: "ingest",
    F_RIDES: "ingest",
    F_LINK_TIMES: "ingest",
    F_ROUTES: "route",
    F_PREFERENCES: "classify",
    F_RUN_META: "classify",
}


class SnapshotError(RuntimeError):
    """A pipeline stage required by the snapshot has not run."""


@dataclass(frozen=True)
class RiderAnalysis:
    rider_id: str
    origin: str
    destination: str
    real_route: Route
    real_metrics: RouteMetrics
    optimal_routes: dict[Objective, Route]
    optimal_metrics: dict[Objective, RouteMetrics]
    gaps: dict[Objective, float]
    preference: dict[str, dict]  # method -> {preferred, tied, scores}

    def preferred(self, method: str = "pi") -> Objective:
        return Objective(self.preference[method]["preferred"])


@dataclass(frozen=True)
class AnalysisSnapshot:
    """Immutable bundle the service answers every request from."""

    network: Network
    riders: dict[str, RiderAnalysis]
    stop_riders: dict[str, tuple[str, ...]]
    config: dict
    scenarios: list[dict] | None = None

    @property
    def default_lambda(self) -> float:
        return float(self.config.get("lambda", 0.0))

    @property
    def default_criterion(self) -> Objective | None:
        """The run's analyst override, if one was configured."""
        raw = self.config.get("criterion")
        return Objective(raw) if raw else None

    def criterion_gap(self, rider: RiderAnalysis, criterion: Objective | None) -> float:
        k = criterion if criterion is not None else rider.preferred()
        return rider.gaps[k]

    def heat(
        self, lam: float, criterion: Objective | None, min_sample: int
    ) -> list[dict]:
        rows = [
            (r.rider_id, r.origin, self.criterion_gap(r, criterion))
            for r in self.riders.values()
        ]
        ranked = heat_from_gaps(rows, lam, min_sample)
        out = []
        for stats in ranked:
            coord = self.network.stops[stats.stop_id].coord
            out.append(
                {
                    "stop_id": stats.stop_id,
                    "lat": coord[0],
                    "lon": coord[1],
                    "Qr": stats.qr,
                    "Qb": stats.qb,
                    "p": stats.probability,
                }
            )
        return out


def _require(out_dir: Path, name: str) -> Path:
    path = out_dir / name
    if not path.exists():
        stage = _STAGE_OF.get(name, "pipeline")
        raise SnapshotError(f"missing {name}; run the `{stage}` stage first")
    return path


def build_snapshot(out_dir: str | Path) -> AnalysisSnapshot:
    """Assemble a snapshot from the batch pipeline's artifact files."""
    out = Path(out_dir)
    network = Network.from_dict(json.loads(_require(out, F_NETWORK).read_text()))
    meta = json.loads(_require(out, F_RUN_META).read_text())

    preferences: dict[str, dict[str, dict]] = {}
    with open(_require(out, F_PREFERENCES), newline="") as fh:
        for row in csv.DictReader(fh):
            scores = {
                o: float(row[f"score_{o.value}"]) for o in AXES
            }
            preferences.setdefault(row["rider_id"], {})[row["method"]] = {
                "preferred": row["preferred"],
                "tied": row["tied"].split("|") if row["tied"] else [],
                "scores": {o.value: s for o, s in scores.items()},
            }

    riders: dict[str, RiderAnalysis] = {}
    stop_riders: dict[str, list[str]] = {}
    with open(_require(out, F_ROUTES)) as fh:
        for line in fh:
            if not line.strip():
                continue
            row = json.loads(line)
            rid = row["rider_id"]
            real_route = route_from_dict(row["real"])
            real_metrics = metrics_from_dict(row["real"]["metrics"])
            opt_routes = {}
            opt_metrics = {}
            gaps = {}
            for obj in Objective:
                dump = row["optimal"][obj.value]
                opt_routes[obj] = route_from_dict(dump)
                opt_metrics[obj] = metrics_from_dict(dump["metrics"])
                gaps[obj] = real_metrics.value(obj) - opt_metrics[obj].value(obj)
            if rid not in preferences:
                raise SnapshotError(f"rider {rid} missing from {F_PREFERENCES}; rerun `classify`")
            riders[rid] = RiderAnalysis(
                rider_id=rid,
                origin=row["origin"],
                destination=row["destination"],
                real_route=real_route,
                real_metrics=real_metrics,
                optimal_routes=opt_routes,
                optimal_metrics=opt_metrics,
                gaps=gaps,
                preference=preferences[rid],
            )
            stop_riders.setdefault(row["origin"], []).append(rid)

    scenarios = None
    scen_path = out / F_SCENARIOS
    if scen_path.exists():
        with open(scen_path, newline="") as fh:
            scenarios = list(csv.DictReader(fh))

    return AnalysisSnapshot(
        network=network,
        riders=riders,
        stop_riders={k: tuple(v) for k, v in stop_riders.items()},
        config=meta,
        scenarios=scenarios,
    )


def _parse_criterion(raw: str | None):
    # "preferred" explicitly asks for each rider's own inferred criterion
    if raw is None or raw in ("", "preferred"):
        return None
    try:
        return Objective(raw)
    except ValueError:
        from fastapi import HTTPException

        raise HTTPException(status_code=400, detail=f"unknown criterion {raw!r}")


def _compare_payload(rider: RiderAnalysis) -> dict:
    from .routing import route_dump

    ordered = [rider.real_metrics] + [rider.optimal_metrics[o] for o in AXES]
    normalized = normalize_metrics(ordered)
    labels = ["real"] + [o.value for o in AXES]
    polygons = {
        label: {
            "normalized": list(vec),
            "vertices": [list(v) for v in KiviatPolygon.from_normalized(vec).vertices],
        }
        for label, vec in zip(labels, normalized)
    }
    return {
        "rider_id": rider.rider_id,
        "origin": rider.origin,
        "destination": rider.destination,
        "real": route_dump(rider.real_route, rider.real_metrics),
        "optimal": {
            o.value: route_dump(rider.optimal_routes[o], rider.optimal_metrics[o])
            for o in AXES
        },
        "gaps": {o.value: rider.gaps[o] for o in AXES},
        "polygons": polygons,
        "preference": rider.preference,
    }


def create_app(snapshot: AnalysisSnapshot, web_dir: str | Path | None = None):
    """Build the FastAPI application serving one snapshot."""
    from fastapi import FastAPI, HTTPException, Query

    app = FastAPI(title="transitsurvey", docs_url=None, redoc_url=None)

    def resolve_lambda(lam: float | None) -> float:
        value = snapshot.default_lambda if lam is None else lam
        if value < 0:
            raise HTTPException(status_code=400, detail="lambda must be non-negative")
        return value

    def resolve_criterion(raw: str | None) -> Objective | None:
        if raw is None:
            return snapshot.default_criterion
        return _parse_criterion(raw)

    @app.get("/api/v1/meta")
    def meta():
        return {
            "config": snapshot.config,
            "counts": {
                "stops": len(snapshot.network.stops),
                "lines": len(snapshot.network.lines),
                "rides": len(snapshot.riders),
            },
            "seed": snapshot.config.get("seed"),
        }

    @app.get("/api/v1/stops/heat")
    def stops_heat(
        lam: float | None = Query(default=None, alias="lambda"),
        criterion: str | None = None,
        min_sample: int = Query(default=1, ge=0),
    ):
        return snapshot.heat(resolve_lambda(lam), resolve_criterion(criterion), min_sample)

    @app.get("/api/v1/stops/{stop_id}/riders")
    def stop_riders(
        stop_id: str,
        lam: float | None = Query(default=None, alias="lambda"),
        criterion: str | None = None,
    ):
        if stop_id not in snapshot.network.stops:
            raise HTTPException(status_code=404, detail=f"unknown stop {stop_id!r}")
        value = resolve_lambda(lam)
        crit = resolve_criterion(criterion)
        out = []
        for rid in snapshot.stop_riders.get(stop_id, ()):
            rider = snapshot.riders[rid]
            k = crit if crit is not None else rider.preferred()
            gap = rider.gaps[k]
            out.append(
                {
                    "rider_id": rid,
                    "destination": rider.destination,
                    "criterion": k.value,
                    "gap": gap,
                    "gap_units": LAMBDA_UNITS[k],
                    "unsatisfied": gap >= value,
                }
            )
        out.sort(key=lambda r: (-r["gap"], r["rider_id"]))
        return out

    @app.get("/api/v1/riders/{rider_id}/compare")
    def rider_compare(rider_id: str):
        rider = snapshot.riders.get(rider_id)
        if rider is None:
            raise HTTPException(status_code=404, detail=f"unknown rider {rider_id!r}")
        return _compare_payload(rider)

    @app.get("/api/v1/riders/{rider_id}/report")
    def rider_report(
        rider_id: str,
        lam: float | None = Query(default=None, alias="lambda"),
        criterion: str | None = None,
    ):
        rider = snapshot.riders.get(rider_id)
        if rider is None:
            raise HTTPException(status_code=404, detail=f"unknown rider {rider_id!r}")
        value = resolve_lambda(lam)
        crit = resolve_criterion(criterion)
        k = crit if crit is not None else rider.preferred()
        if rider.gaps[k] < value:
            raise HTTPException(
                status_code=404,
                detail=f"rider {rider_id} is satisfied at lambda={value}; no report",
            )
        from .ingest import RideRecord

        ride = RideRecord(rider.rider_id, rider.origin, rider.destination, rider.real_route)
        report = build_survey_report(
            ride,
            None,
            rider.real_metrics,
            rider.optimal_routes[k],
            rider.optimal_metrics[k],
            value,
            criterion=k,
        )
        return report.to_dict()

    @app.get("/api/v1/simulate")
    def simulate():
        if snapshot.scenarios is None:
            raise HTTPException(status_code=404, detail="no simulation results attached")
        return snapshot.scenarios

    if web_dir is not None and Path(web_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(web_dir), html=True), name="dashboard")

    return app


def serve(
    snapshot: AnalysisSnapshot,
    host: str = "127.0.0.1",
    port: int = 8000,
    web_dir: str | Path | None = None,
) -> None:
    """Run the service until interrupted."""
    import uvicorn

    uvicorn.run(create_app(snapshot, web_dir), host=host, port=port, log_level="warning")
