"""Batch pipeline driver.

Subcommands mirror the analysis workflow: ingest raw tables, compute the
per-ride optimal alternatives, classify preferences and satisfaction,
rank stops, emit interviewer reports, run the targeting simulation, and
serve the read-only API. Every stage writes plain, deterministic files
into the output directory so each step stays inspectable.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import api
from .graph import build_state_graph, build_transit_graph
from .ingest import (
    GEODESIC,
    PLANAR,
    LinkTimeTable,
    Network,
    NetworkError,
    RideError,
    RideRecord,
    load_network,
    load_rides,
    estimate_link_times,
)
from .preference import ED, PI, classify_preference
from .quality import LAMBDA_UNITS, Verdict, build_survey_report, report_text
from .routing import (
    Objective,
    OptimalRouteIndex,
    route_dump,
    route_metrics,
)
from .sim import (
    GenerationError,
    SynthParams,
    generate_synthetic_city,
    render_scenarios,
    run_scenarios,
    scenario_csv_rows,
)


@dataclass
class PipelineConfig:
    stops: str | None = None
    lines: str | None = None
    rides: str | None = None
    gps: str | None = None
    mode: str = PLANAR
    lam: float = 0.0
    criterion: str | None = None
    method: str = PI
    min_sample: int = 5
    out: str = "out"
    seed: int = 0
    top_n: int = 10
    max_transfers: int = 3
    strict: bool = False
    host: str = "127.0.0.1"
    port: int = 8000
    web_dir: str | None = None
    chart: bool = False
    sim: dict | None = None


def _load_config(args: argparse.Namespace) -> PipelineConfig:
    cfg = PipelineConfig()
    for name in vars(cfg):
        if hasattr(args, name) and getattr(args, name) is not None:
            setattr(cfg, name, getattr(args, name))
    if getattr(args, "config", None):
        overrides = json.loads(Path(args.config).read_text())
        for key, value in overrides.items():
            attr = "lam" if key == "lambda" else key
            if not hasattr(cfg, attr):
                raise ValueError(f"unknown config key {key!r}")
            setattr(cfg, attr, value)
    if cfg.lam < 0:
        raise ValueError("lambda must be non-negative")
    if cfg.mode not in (GEODESIC, PLANAR):
        raise ValueError(f"mode must be {GEODESIC!r} or {PLANAR!r}")
    if cfg.criterion is not None:
        Objective(cfg.criterion)  # raises on unknown criterion
    return cfg


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _write_jsonl(path: Path, rows) -> None:
    with open(path, "w") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True, separators=(",", ":")) + "\n")


def _write_csv(path: Path, rows) -> None:
    with open(path, "w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)


def _out_dir(cfg: PipelineConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _read_network(out: Path) -> Network:
    return Network.from_dict(json.loads((out / api.F_NETWORK).read_text()))


def _read_times(out: Path) -> LinkTimeTable:
    return LinkTimeTable.from_dict(json.loads((out / api.F_LINK_TIMES).read_text()))


def _read_rides(out: Path, network: Network) -> list[RideRecord]:
    rides, rejected = load_rides(str(out / api.F_RIDES), network)
    if rejected:
        raise RideError(f"cached rides failed revalidation: {rejected[0]}")
    return rides


def cmd_ingest(cfg: PipelineConfig) -> int:
    if not cfg.stops or not cfg.lines or not cfg.rides:
        raise ValueError("ingest needs --stops, --lines and --rides")
    out = _out_dir(cfg)
    network = load_network(cfg.stops, cfg.lines, cfg.mode)
    rides, rejected = load_rides(cfg.rides, network, strict=cfg.strict)
    if cfg.gps:
        times, gps_skipped = estimate_link_times(cfg.gps, network)
    else:
        times, gps_skipped = LinkTimeTable(), 0
    _write_json(out / api.F_NETWORK, network.to_dict())
    _write_json(out / api.F_GRAPH, build_transit_graph(network).to_dict())
    _write_json(out / api.F_LINK_TIMES, times.to_dict())
    _write_jsonl(out / api.F_RIDES, [r.to_dict() for r in rides])
    _write_json(
        out / api.F_INGEST_SUMMARY,
        {
            "stops": len(network.stops),
            "lines": len(network.lines),
            "rides_accepted": len(rides),
            "rides_rejected": rejected,
            "gps_records_skipped": gps_skipped,
        },
    )
    print(
        f"ingest: {len(network.stops)} stops, {len(network.lines)} lines, "
        f"{len(rides)} rides accepted, {len(rejected)} rejected"
    )
    return 0


def cmd_route(cfg: PipelineConfig) -> int:
    out = _out_dir(cfg)
    network = _read_network(out)
    times = _read_times(out)
    rides = _read_rides(out, network)
    graph = build_transit_graph(network)
    sg = build_state_graph(network, times)
    cap = max([cfg.max_transfers] + [len(r.real_route.legs) - 1 for r in rides])
    index = OptimalRouteIndex(graph, sg, max_transfers=cap)
    rows = {}
    for ride in sorted(rides, key=lambda r: r.origin):  # cache-friendly order
        real_m = route_metrics(ride.real_route, network, times)
        optimal = {}
        for obj in Objective:
            route = index.route(ride.origin, ride.destination, obj)
            if route is None:
                raise ValueError(
                    f"rider {ride.rider_id}: no optimal {obj.value} route "
                    f"{ride.origin}->{ride.destination}"
                )
            optimal[obj.value] = route_dump(route, route_metrics(route, network, times))
        rows[ride.rider_id] = {
            "rider_id": ride.rider_id,
            "origin": ride.origin,
            "destination": ride.destination,
            "real": route_dump(ride.real_route, real_m),
            "optimal": optimal,
        }
    _write_jsonl(out / api.F_ROUTES, [rows[r.rider_id] for r in rides])
    print(f"route: optimal alternatives for {len(rides)} rides ({len(Objective)} objectives)")
    return 0


def _classify_rows(out: Path):
    from .routing import metrics_from_dict

    with open(out / api.F_ROUTES) as fh:
        for line in fh:
            if line.strip():
                row = json.loads(line)
                real = metrics_from_dict(row["real"]["metrics"])
                optimal = {
                    Objective(k): metrics_from_dict(v["metrics"])
                    for k, v in row["optimal"].items()
                }
                yield row, real, optimal


def cmd_classify(cfg: PipelineConfig) -> int:
    out = _out_dir(cfg)
    if not (out / api.F_ROUTES).exists():
        raise ValueError("classify needs route outputs; run `route` first")
    pref_rows = [
        ["rider_id", "method", "preferred", "score_distance", "score_time",
         "score_transfers", "score_hops", "tied"]
    ]
    verdict_rows = [
        ["rider_id", "origin", "criterion", "lambda", "lambda_units",
         "real_value", "optimal_value", "gap", "verdict"]
    ]
    n_unsat = 0
    total = 0
    for row, real, optimal in _classify_rows(out):
        results = {m: classify_preference(real, optimal, m) for m in (PI, ED)}
        for m in (PI, ED):
            res = results[m]
            pref_rows.append(
                [
                    row["rider_id"],
                    m,
                    res.preferred.value,
                    *(f"{res.scores[o]:.12g}" for o in Objective),
                    "|".join(o.value for o in res.tied),
                ]
            )
        criterion = (
            Objective(cfg.criterion) if cfg.criterion else results[cfg.method].preferred
        )
        real_value = real.value(criterion)
        optimal_value = optimal[criterion].value(criterion)
        gap = real_value - optimal_value
        verdict = (
            Verdict.UNSATISFACTORY if gap >= cfg.lam else Verdict.SATISFACTORY
        )
        n_unsat += verdict is Verdict.UNSATISFACTORY
        total += 1
        verdict_rows.append(
            [
                row["rider_id"],
                row["origin"],
                criterion.value,
                f"{cfg.lam:g}",
                LAMBDA_UNITS[criterion],
                f"{real_value:.12g}",
                f"{optimal_value:.12g}",
                f"{gap:.12g}",
                verdict.value,
            ]
        )
    _write_csv(out / api.F_PREFERENCES, pref_rows)
    _write_csv(out / api.F_VERDICTS, verdict_rows)
    _write_json(
        out / api.F_RUN_META,
        {
            "lambda": cfg.lam,
            "criterion": cfg.criterion,
            "method": cfg.method,
            "min_sample": cfg.min_sample,
            "seed": cfg.seed,
            "mode": cfg.mode,
        },
    )
    print(f"classify: {total} rides, {n_unsat} unsatisfactory at lambda={cfg.lam:g}")
    return 0


def cmd_rank(cfg: PipelineConfig) -> int:
    out = _out_dir(cfg)
    snapshot = api.build_snapshot(out)
    criterion = Objective(cfg.criterion) if cfg.criterion else None
    heat = snapshot.heat(cfg.lam, criterion, cfg.min_sample)
    rows = [["stop_id", "lat", "lon", "Qr", "Qb", "probability"]]
    for entry in heat:
        rows.append(
            [
                entry["stop_id"],
                f"{entry['lat']:.6f}",
                f"{entry['lon']:.6f}",
                str(entry["Qr"]),
                str(entry["Qb"]),
                f"{entry['p']:.6f}",
            ]
        )
    _write_csv(out / api.F_RANKING, rows)
    print(f"rank: {len(heat)} stops ranked at lambda={cfg.lam:g}")
    return 0


def cmd_report(cfg: PipelineConfig) -> int:
    out = _out_dir(cfg)
    snapshot = api.build_snapshot(out)
    criterion = Objective(cfg.criterion) if cfg.criterion else None
    candidates = []
    for rider in snapshot.riders.values():
        k = criterion if criterion is not None else rider.preferred(cfg.method)
        gap = rider.gaps[k]
        if gap >= cfg.lam:
            candidates.append((-gap, rider.rider_id, rider, k))
    candidates.sort(key=lambda c: (c[0], c[1]))
    reports_dir = out / "reports"
    reports_dir.mkdir(exist_ok=True)
    written = 0
    for _neg, rid, rider, k in candidates[: cfg.top_n]:
        ride = RideRecord(rider.rider_id, rider.origin, rider.destination, rider.real_route)
        report = build_survey_report(
            ride,
            None,
            rider.real_metrics,
            rider.optimal_routes[k],
            rider.optimal_metrics[k],
            cfg.lam,
            criterion=k,
        )
        _write_json(reports_dir / f"report_{rid}.json", report.to_dict())
        (reports_dir / f"report_{rid}.txt").write_text(report_text(report))
        written += 1
    print(f"report: {written} survey reports in {reports_dir}")
    return 0


def cmd_simulate(cfg: PipelineConfig) -> int:
    out = _out_dir(cfg)
    sim_cfg = dict(cfg.sim or {})
    stop_counts = sim_cfg.pop("stop_counts", [10, 50, 100])
    lambdas = sim_cfg.pop("lambdas", [0.5, 1, 2, 3, 4, 5, 6, 7, 8])
    trials = int(sim_cfg.pop("trials", 1000))
    if "preference_mix" in sim_cfg:
        sim_cfg["preference_mix"] = {
            Objective(k): float(v) for k, v in sim_cfg["preference_mix"].items()
        }
    if "detour_ranges" in sim_cfg:
        sim_cfg["detour_ranges"] = {
            Objective(k): tuple(v) for k, v in sim_cfg["detour_ranges"].items()
        }
    params = SynthParams(seed=cfg.seed, **sim_cfg)
    city = generate_synthetic_city(params)
    results = run_scenarios(
        city.network,
        city.rides,
        stop_counts,
        lambdas,
        trials=trials,
        seed=cfg.seed,
        gaps=city.planted_gaps(),
    )
    _write_csv(out / api.F_SCENARIOS, scenario_csv_rows(results))
    if cfg.chart:
        render_scenarios(results, str(out / "scenarios.png"))
    n_sub = sum(1 for p in city.planted.values() if p.suboptimal)
    print(
        f"simulate: {len(city.rides)} riders ({n_sub} suboptimal) on "
        f"{len(city.network.stops)} stops; {len(results)} curves written"
    )
    return 0


def cmd_serve(cfg: PipelineConfig) -> int:
    out = _out_dir(cfg)
    snapshot = api.build_snapshot(out)
    web = cfg.web_dir
    if web is None and Path("frontend/dist").is_dir():
        web = "frontend/dist"
    print(f"serve: http://{cfg.host}:{cfg.port} (rides: {len(snapshot.riders)})")
    api.serve(snapshot, cfg.host, cfg.port, web)
    return 0


def cmd_all(cfg: PipelineConfig) -> int:
    for step in (cmd_ingest, cmd_route, cmd_classify, cmd_rank, cmd_report):
        code = step(cfg)
        if code != 0:
            return code
    return 0


_COMMANDS = {
    "ingest": cmd_ingest,
    "route": cmd_route,
    "classify": cmd_classify,
    "rank": cmd_rank,
    "report": cmd_report,
    "simulate": cmd_simulate,
    "serve": cmd_serve,
    "all": cmd_all,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="transitsurvey",
        description="Bus-ride quality analysis and survey planning pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--stops")
        p.add_argument("--lines")
        p.add_argument("--rides")
        p.add_argument("--gps")
        p.add_argument("--mode", choices=(GEODESIC, PLANAR))
        p.add_argument("--lambda", dest="lam", type=float)
        p.add_argument("--criterion", choices=[o.value for o in Objective])
        p.add_argument("--method", choices=(PI, ED))
        p.add_argument("--min-sample", dest="min_sample", type=int)
        p.add_argument("--out")
        p.add_argument("--seed", type=int)
        p.add_argument("--top-n", dest="top_n", type=int)
        p.add_argument("--max-transfers", dest="max_transfers", type=int)
        p.add_argument("--strict", action="store_const", const=True)
        p.add_argument("--host")
        p.add_argument("--port", type=int)
        p.add_argument("--web-dir", dest="web_dir")
        p.add_argument("--chart", action="store_const", const=True)
        p.add_argument("--config")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _load_config(args)
        return _COMMANDS[args.command](cfg)
    except (
        NetworkError,
        RideError,
        GenerationError,
        api.SnapshotError,
        ValueError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
