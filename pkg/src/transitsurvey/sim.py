"""Synthetic cities and validation of survey-site targeting.

Generates a grid city with random bus lines and a rider population in
which a configurable share takes routes measurably worse than their
criterion optimum, concentrated at a few "problem" stops. Scenario runs
then compare the chance of meeting an unsatisfied rider when stops are
picked by the ranking versus uniformly at random.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .graph import build_state_graph, build_transit_graph
from .ingest import BusLine, LinkTimeTable, Network, RideRecord, Stop, PLANAR
from .quality import StopStats, Verdict, rank_stops
from .preference import classify_preference
from .routing import (
    Leg,
    Objective,
    OptimalRouteIndex,
    Route,
    RouteMetrics,
    route_metrics,
    _best_sink_key,
    _route_from_settled,
    _search,
)

OBJECTIVES = tuple(Objective)


@dataclass(frozen=True)
class SynthParams:
    """Knobs for the synthetic city generator."""

    grid_rows: int = 10
    grid_cols: int = 20
    spacing_km: float = 1.0
    position_jitter: float = 0.25  # fraction of spacing; keeps link lengths varied
    n_lines: int = 30
    line_len_range: tuple[int, int] = (12, 20)
    n_riders: int = 10_000
    preference_mix: dict[Objective, float] = field(
        default_factory=lambda: {
            Objective.TRANSFERS: 0.4,
            Objective.TIME: 0.3,
            Objective.DISTANCE: 0.2,
            Objective.HOPS: 0.1,
        }
    )
    suboptimal_fraction: float = 0.2
    detour_ranges: dict[Objective, tuple[float, float]] = field(
        default_factory=lambda: {
            Objective.DISTANCE: (1.0, 6.0),
            Objective.TIME: (240.0, 1200.0),
            Objective.TRANSFERS: (1.0, 2.0),
            Objective.HOPS: (2.0, 8.0),
        }
    )
    problem_stop_fraction: float = 0.1
    problem_weight: float = 9.0
    speed_range_kmh: tuple[float, float] = (15.0, 40.0)
    default_speed_kmh: float = 20.0
    transfer_wait_s: float = 300.0
    max_transfers: int = 3
    seed: int = 42
    line_retry_cap: int = 20
    via_tries: int = 30
    fill_retry_cap: int = 40

    def validate(self) -> None:
        if self.grid_rows < 1 or self.grid_cols < 1 or self.grid_rows * self.grid_cols < 4:
            raise ValueError("grid too small")
        if self.n_lines < 1 or self.n_riders < 1:
            raise ValueError("line and rider counts must be positive")
        if not 0.0 <= self.suboptimal_fraction <= 1.0:
            raise ValueError("suboptimal_fraction must be within [0, 1]")
        if not 0.0 <= self.problem_stop_fraction <= 1.0:
            raise ValueError("problem_stop_fraction must be within [0, 1]")
        if not 0.0 <= self.position_jitter < 0.5:
            raise ValueError("position_jitter must be within [0, 0.5)")
        total = sum(self.preference_mix.get(o, 0.0) for o in OBJECTIVES)
        if abs(total - 1.0) > 1e-9 or any(w < 0 for w in self.preference_mix.values()):
            raise ValueError("preference_mix must be non-negative and sum to 1")
        for obj, (lo, hi) in self.detour_ranges.items():
            if lo <= 0 or hi < lo:
                raise ValueError(f"bad detour range for {obj.value}: ({lo}, {hi})")


@dataclass(frozen=True)
class PlantedBehavior:
    """Ground truth recorded for each generated rider."""

    criterion: Objective
    suboptimal: bool
    detour: float  # criterion-unit gap between ridden and optimal route


@dataclass
class SyntheticCity:
    network: Network
    times: LinkTimeTable
    rides: list[RideRecord]
    planted: dict[str, PlantedBehavior]
    params: SynthParams

    @property
    def max_planted_detour(self) -> float:
        return max((p.detour for p in self.planted.values()), default=0.0)

    def planted_gaps(self) -> dict[str, float]:
        return {rid: p.detour for rid, p in self.planted.items()}


class GenerationError(RuntimeError):
    """The requested synthetic city could not be realized."""


def _grid_stop_id(r: int, c: int) -> str:
    return f"S{r:02d}{c:02d}"


def _random_simple_path(rng, rows: int, cols: int, target_len: int) -> list[tuple[int, int]]:
    r = int(rng.integers(rows))
    c = int(rng.integers(cols))
    path = [(r, c)]
    seen = {(r, c)}
    while len(path) < target_len:
        moves = [
            (r + dr, c + dc)
            for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1))
            if 0 <= r + dr < rows and 0 <= c + dc < cols and (r + dr, c + dc) not in seen
        ]
        if not moves:
            break
        r, c = moves[int(rng.integers(len(moves)))]
        path.append((r, c))
        seen.add((r, c))
    return path


def _make_lines(rng, params: SynthParams) -> tuple[list[BusLine], dict[str, float]]:
    lo, hi = params.line_len_range
    lo = max(2, lo)
    n_paths = (params.n_lines + 1) // 2
    lines: list[BusLine] = []
    speeds: dict[str, float] = {}
    for i in range(n_paths):
        path: list[tuple[int, int]] = []
        for _ in range(60):
            target = int(rng.integers(lo, hi + 1))
            path = _random_simple_path(rng, params.grid_rows, params.grid_cols, target)
            if len(path) >= lo:
                break
        if len(path) < 2:
            raise GenerationError("grid too constrained to route a line")
        stops = tuple(_grid_stop_id(r, c) for r, c in path)
        speed = float(rng.uniform(*params.speed_range_kmh))
        fwd = f"L{i:02d}"
        lines.append(BusLine(fwd, stops))
        speeds[fwd] = speed
        if len(lines) < params.n_lines:
            rev = f"L{i:02d}R"
            lines.append(BusLine(rev, tuple(reversed(stops))))
            speeds[rev] = speed
    return lines[: params.n_lines], speeds


def _build_city_network(rng, params: SynthParams) -> tuple[Network, LinkTimeTable]:
    stops = []
    jitter = params.position_jitter * params.spacing_km
    for r in range(params.grid_rows):
        for c in range(params.grid_cols):
            dx, dy = (rng.uniform(-jitter, jitter), rng.uniform(-jitter, jitter)) if jitter else (0.0, 0.0)
            stops.append(
                Stop(_grid_stop_id(r, c), (r * params.spacing_km + dx, c * params.spacing_km + dy))
            )
    lines, speeds = _make_lines(rng, params)
    endpoints: dict[str, int] = {}
    for line in lines:
        for s in (line.itinerary[0], line.itinerary[-1]):
            endpoints[s] = endpoints.get(s, 0) + 1
    terminal = {s for s, n in endpoints.items() if n >= 4}
    stops = [replace(s, is_terminal=s.stop_id in terminal) for s in stops]
    network = Network.build(stops, lines, PLANAR)
    times = LinkTimeTable(
        default_speed_kmh=params.default_speed_kmh, transfer_wait_s=params.transfer_wait_s
    )
    for line in lines:
        speed = speeds[line.line_id]
        for u, v in zip(line.itinerary, line.itinerary[1:]):
            times.times[(line.line_id, u, v)] = network.distance_km(u, v) / speed * 3600.0
    return network, times


def _merge_routes(a: Route, b: Route) -> Route:
    """Concatenate at a shared stop, fusing a same-line junction into one leg."""
    if a.destination != b.origin:
        raise ValueError("routes do not join")
    first, second = a.legs[-1], b.legs[0]
    if first.line_id == second.line_id:
        fused = Leg(
            first.line_id,
            first.board,
            second.alight,
            first.stop_sequence + second.stop_sequence[1:],
        )
        return Route(a.legs[:-1] + (fused,) + b.legs[1:])
    return Route(a.legs + b.legs)


def generate_synthetic_city(params: SynthParams) -> SyntheticCity:
    """Build a seeded city plus rider population with planted behavior.

    Exactly round(suboptimal_fraction * n_riders) riders ride a feasible
    route worse than their criterion optimum by a gap inside the
    configured detour range; the rest ride the optimum itself. Suboptimal
    riders are drawn preferentially from a small set of problem stops.
    """
    params.validate()
    root = np.random.SeedSequence(params.seed)
    for attempt, seq in enumerate(root.spawn(params.line_retry_cap)):
        rng = np.random.default_rng(seq)
        network, times = _build_city_network(rng, params)
        try:
            return _populate(rng, params, network, times)
        except GenerationError:
            if attempt == params.line_retry_cap - 1:
                raise
    raise GenerationError("unreachable")


def _populate(rng, params: SynthParams, network: Network, times: LinkTimeTable) -> SyntheticCity:
    graph = build_transit_graph(network)
    sg = build_state_graph(network, times)
    index = OptimalRouteIndex(graph, sg, max_transfers=params.max_transfers)

    covered = sorted(graph.nodes)
    usable = [s for s in covered if index.values(s, Objective.DISTANCE)]
    if len(usable) < 2:
        raise GenerationError("generated lines leave no routable stop pairs")

    mix = np.array([params.preference_mix.get(o, 0.0) for o in OBJECTIVES])
    n = params.n_riders
    rider_ids = [f"r{i:05d}" for i in range(n)]
    criteria = [OBJECTIVES[int(k)] for k in rng.choice(len(OBJECTIVES), size=n, p=mix)]
    origins = [usable[int(i)] for i in rng.integers(len(usable), size=n)]
    dests: list[str] = []
    for i in range(n):
        reachable = sorted(index.values(origins[i], Objective.DISTANCE))
        dests.append(reachable[int(rng.integers(len(reachable)))])

    used_origins = sorted(set(origins))
    n_problem = max(1, round(params.problem_stop_fraction * len(used_origins)))
    n_problem = min(n_problem, len(used_origins))
    problem = set(
        str(s) for s in rng.choice(np.array(used_origins, dtype=object), size=n_problem, replace=False)
    )

    n_sub = round(params.suboptimal_fraction * n)
    weights = np.array([params.problem_weight if o in problem else 1.0 for o in origins])
    # Weighted shuffle (exponential-keys trick): heavier riders land earlier.
    keys = rng.exponential(size=n) / weights
    priority = [int(i) for i in np.argsort(keys, kind="stable")]

    suboptimal: dict[int, Route | None] = {}  # rider index -> detour route once found
    detour_of: dict[int, float] = {}
    want = priority[:n_sub]
    backlog = priority[n_sub:]
    for _round in range(params.fill_retry_cap):
        if not want:
            break
        failed = _assign_detours(rng, params, network, times, index, origins, dests, criteria,
                                 want, suboptimal, detour_of)
        want = []
        for _ in failed:
            if not backlog:
                raise GenerationError("could not plant the requested suboptimal share")
            want.append(backlog.pop(0))
    if want:
        raise GenerationError("could not plant the requested suboptimal share")

    rides: list[RideRecord] = []
    planted: dict[str, PlantedBehavior] = {}
    groups: dict[tuple[str, Objective], list[int]] = {}
    for i in range(n):
        groups.setdefault((origins[i], criteria[i]), []).append(i)
    routes: dict[int, Route] = {}
    for (origin, objective) in sorted(groups, key=lambda k: (k[0], k[1].value)):
        settled, _ = _search(sg, origin, objective, params.max_transfers)
        for i in groups[(origin, objective)]:
            if i in suboptimal:
                routes[i] = suboptimal[i]  # type: ignore[assignment]
                continue
            end = _best_sink_key(sg, settled, dests[i])
            if end is None:
                raise GenerationError(f"no route {origin}->{dests[i]}")
            routes[i] = _route_from_settled(sg, settled, end)
    for i in range(n):
        rides.append(RideRecord(rider_ids[i], origins[i], dests[i], routes[i]))
        planted[rider_ids[i]] = PlantedBehavior(
            criterion=criteria[i],
            suboptimal=i in suboptimal,
            detour=detour_of.get(i, 0.0),
        )
    return SyntheticCity(network=network, times=times, rides=rides, planted=planted, params=params)


def _assign_detours(rng, params, network, times, index, origins, dests, criteria,
                    rider_indices, suboptimal, detour_of) -> list[int]:
    """Find a within-range detour route per rider; returns indices that failed."""
    sg = index.sg
    failed: list[int] = []
    by_group: dict[tuple[str, Objective], list[int]] = {}
    for i in rider_indices:
        by_group.setdefault((origins[i], criteria[i]), []).append(i)
    for (origin, objective) in sorted(by_group, key=lambda k: (k[0], k[1].value)):
        settled, _ = _search(sg, origin, objective, params.max_transfers)
        from_origin = index.values(origin, objective)
        lo, hi = params.detour_ranges[objective]
        for i in by_group[(origin, objective)]:
            dest = dests[i]
            opt_val = from_origin[dest][0]
            vias = [
                v
                for v in sorted(from_origin)
                if v != dest and v != origin and _via_plausible(
                    index, objective, from_origin[v], v, dest, opt_val, lo, hi,
                    times.transfer_wait_s,
                )
            ]
            order = rng.permutation(len(vias))
            route = None
            for vi in order[: params.via_tries]:
                via = vias[int(vi)]
                end1 = _best_sink_key(sg, settled, via)
                if end1 is None:
                    continue
                part1 = _route_from_settled(sg, settled, end1)
                s2, end2 = _search(sg, via, objective, params.max_transfers, destination=dest)
                if end2 is None:
                    continue
                part2 = _route_from_settled(sg, s2, end2)
                candidate = _merge_routes(part1, part2)
                gap = route_metrics(candidate, network, times).value(objective) - opt_val
                if lo - 1e-12 <= gap <= hi + 1e-12 and gap > 0:
                    route = candidate
                    detour_of[i] = gap
                    break
            if route is None:
                failed.append(i)
            else:
                suboptimal[i] = route
    return failed


def _via_plausible(index, objective, cost_to_via, via, dest, opt_val, lo, hi, wait_s) -> bool:
    cost_back = index.values(via, objective).get(dest)
    if cost_back is None:
        return False
    base = cost_to_via[0] + cost_back[0]
    # Joining at the via may or may not add one transfer (and its wait).
    if objective is Objective.TRANSFERS:
        slack = 1.0
    elif objective is Objective.TIME:
        slack = wait_s
    else:
        slack = 0.0
    gap_min = base - opt_val
    gap_max = base + slack - opt_val
    return gap_max >= lo and gap_min <= hi


# ---------------------------------------------------------------------------
# Scenario evaluation.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScenarioResult:
    """One probability-vs-threshold curve for one selection method."""

    stop_count: int
    method: str  # "targeted" | "random"
    curve: tuple[tuple[float, float], ...]
    seed: int
    trials: int | None = None
    stderr: tuple[float, ...] | None = None
    clamped: bool = False


def evaluate_selection(
    records: Iterable[tuple[str, Verdict]], selected_stops: set[str]
) -> float:
    """Chance a rider departing the selected stops is unsatisfied.

    Pools counts across the selection: total unsatisfied departures over
    total departures; 0 when nothing departs there.
    """
    if not selected_stops:
        raise ValueError("selected_stops must be non-empty")
    qr = total = 0
    for origin, verdict in records:
        if origin in selected_stops:
            total += 1
            if verdict is Verdict.UNSATISFACTORY:
                qr += 1
    return qr / total if total else 0.0


def compute_criterion_gaps(
    network: Network,
    rides: Sequence[RideRecord],
    times: LinkTimeTable,
    criteria: Mapping[str, Objective] | Objective | None = None,
    max_transfers: int = 3,
) -> dict[str, float]:
    """Per-rider gap between the ridden and optimal route, in criterion units.

    `criteria` may be one objective for everyone, a per-rider mapping, or
    None to infer each rider's preference from the ride itself.
    """
    graph = build_transit_graph(network)
    sg = build_state_graph(network, times)
    index = OptimalRouteIndex(graph, sg, max_transfers=max_transfers)
    gaps: dict[str, float] = {}
    for ride in rides:
        real = route_metrics(ride.real_route, network, times)
        opts = {
            o: index.metrics(ride.origin, ride.destination, o) for o in OBJECTIVES
        }
        if any(m is None for m in opts.values()):
            raise ValueError(f"rider {ride.rider_id}: destination unreachable by search")
        if isinstance(criteria, Objective):
            k = criteria
        elif criteria is not None:
            k = criteria[ride.rider_id]
        else:
            k = classify_preference(real, opts).preferred  # type: ignore[arg-type]
        gaps[ride.rider_id] = real.value(k) - opts[k].value(k)  # type: ignore[union-attr]
    return gaps


def run_scenarios(
    network: Network,
    rides: Sequence[RideRecord],
    stop_counts: Sequence[int],
    lambdas: Sequence[float],
    trials: int = 1000,
    seed: int = 0,
    *,
    gaps: Mapping[str, float] | None = None,
    times: LinkTimeTable | None = None,
    criteria: Mapping[str, Objective] | Objective | None = None,
    min_sample: int = 1,
) -> list[ScenarioResult]:
    """Targeted-vs-random survey curves over a threshold sweep.

    For each stop count and threshold, the targeted probability pools
    departures over the top-ranked stops (re-ranked at that threshold);
    the random baseline averages the same pooled probability over
    `trials` uniform draws of stops that have at least one departure.
    """
    lams = [float(l) for l in lambdas]
    if any(b <= a for a, b in zip(lams, lams[1:])):
        raise ValueError("lambdas must be strictly increasing")
    if gaps is None:
        if times is None:
            raise ValueError("need a LinkTimeTable to compute gaps")
        gaps = compute_criterion_gaps(network, rides, times, criteria)

    origins = [r.origin for r in rides]
    gap_arr = np.array([gaps[r.rider_id] for r in rides])
    stops = sorted(set(origins))
    stop_idx = {s: i for i, s in enumerate(stops)}
    origin_idx = np.array([stop_idx[o] for o in origins])
    n_stops = len(stops)

    results: list[ScenarioResult] = []
    for sc_i, requested in enumerate(stop_counts):
        count = min(int(requested), n_stops)
        clamped = count != int(requested)
        targeted_curve: list[tuple[float, float]] = []
        random_curve: list[tuple[float, float]] = []
        random_se: list[float] = []
        for lam_i, lam in enumerate(lams):
            unsat = gap_arr >= lam
            qr = np.bincount(origin_idx, weights=unsat, minlength=n_stops)
            tot = np.bincount(origin_idx, minlength=n_stops)
            stats = [
                StopStats(stops[i], int(qr[i]), int(tot[i] - qr[i])) for i in range(n_stops)
            ]
            top = rank_stops(stats, min_sample)[:count]
            t_qr = sum(s.qr for s in top)
            t_tot = sum(s.total for s in top)
            targeted_curve.append((lam, t_qr / t_tot if t_tot else 0.0))

            eligible = np.flatnonzero(tot > 0)
            rng = np.random.default_rng(
                np.random.SeedSequence(entropy=seed, spawn_key=(sc_i, lam_i))
            )
            k = min(count, len(eligible))
            draws = np.empty((trials, k), dtype=int)
            for t in range(trials):
                draws[t] = rng.choice(eligible, size=k, replace=False)
            ps = qr[draws].sum(axis=1) / tot[draws].sum(axis=1)
            random_curve.append((lam, float(ps.mean())))
            random_se.append(float(ps.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0)
        results.append(
            ScenarioResult(int(requested), "targeted", tuple(targeted_curve), seed, None, None, clamped)
        )
        results.append(
            ScenarioResult(
                int(requested), "random", tuple(random_curve), seed, trials, tuple(random_se), clamped
            )
        )
    return results


def scenario_csv_rows(results: Sequence[ScenarioResult]) -> list[list[str]]:
    rows = [["stop_count", "method", "lambda", "probability", "trials"]]
    for res in results:
        for lam, p in res.curve:
            rows.append(
                [
                    str(res.stop_count),
                    res.method,
                    f"{lam:g}",
                    f"{p:.6f}",
                    str(res.trials) if res.trials is not None else "",
                ]
            )
    return rows


def render_scenarios(results: Sequence[ScenarioResult], path: str) -> None:
    """Save a panel chart (one panel per stop count) of the two curves."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    counts = sorted({r.stop_count for r in results})
    fig, axes = plt.subplots(1, len(counts), figsize=(4 * len(counts), 3.4), squeeze=False)
    for ax, count in zip(axes[0], counts):
        for res in results:
            if res.stop_count != count:
                continue
            xs = [lam for lam, _ in res.curve]
            ys = [p for _, p in res.curve]
            color = "tab:green" if res.method == "targeted" else "tab:red"
            ax.plot(xs, ys, "o-", color=color, label=res.method)
        ax.set_title(f"{count} stops")
        ax.set_xlabel("threshold")
        ax.set_ylabel("P(unsatisfied)")
        ax.set_ylim(-0.02, 1.02)
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


# ---------------------------------------------------------------------------
# Populations with a known preferred objective (for recovery studies).
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PlantedRider:
    rider_id: str
    criterion: Objective
    real_metrics: RouteMetrics
    optimal_metrics: dict[Objective, RouteMetrics]


def planted_preference_population(
    n_per_objective: int,
    seed: int = 0,
    max_cities: int = 400,
) -> list[PlantedRider]:
    """Riders who follow exactly one objective's optimal route.

    Drawn from small perturbed cities (jittered stop positions, per-line
    speeds) and kept only where the planted objective's optimal metric
    vector differs from every other objective's optimum, so the planted
    preference is identifiable at all.
    """
    buckets: dict[Objective, list[PlantedRider]] = {o: [] for o in OBJECTIVES}
    root = np.random.SeedSequence(seed)
    for city_i, seq in enumerate(root.spawn(max_cities)):
        if all(len(b) >= n_per_objective for b in buckets.values()):
            break
        params = SynthParams(
            grid_rows=7,
            grid_cols=7,
            spacing_km=1.0,
            position_jitter=0.35,
            n_lines=16,
            line_len_range=(6, 12),
            n_riders=1,
            suboptimal_fraction=0.0,
            speed_range_kmh=(10.0, 45.0),
            seed=int(seq.generate_state(1)[0] % (2**31)),
        )
        rng = np.random.default_rng(seq)
        try:
            network, times = _build_city_network(rng, params)
        except GenerationError:
            continue
        graph = build_transit_graph(network)
        sg = build_state_graph(network, times)
        index = OptimalRouteIndex(graph, sg, max_transfers=params.max_transfers)
        for origin in sorted(graph.nodes):
            if all(len(b) >= n_per_objective for b in buckets.values()):
                break
            reachable = index.values(origin, Objective.DISTANCE)
            for dest in sorted(reachable):
                opts = {o: index.metrics(origin, dest, o) for o in OBJECTIVES}
                if any(m is None for m in opts.values()):
                    continue
                vectors = {o: m.as_vector() for o, m in opts.items()}  # type: ignore[union-attr]
                for k in OBJECTIVES:
                    if len(buckets[k]) >= n_per_objective:
                        continue
                    if sum(vectors[k] == v for v in vectors.values()) == 1:
                        buckets[k].append(
                            PlantedRider(
                                f"c{city_i}:{origin}-{dest}:{k.value}", k, opts[k], dict(opts)  # type: ignore[arg-type]
                            )
                        )
    short = {o.value: len(b) for o, b in buckets.items() if len(b) < n_per_objective}
    if short:
        raise GenerationError(f"could not fill planted population: {short}")
    out: list[PlantedRider] = []
    for o in OBJECTIVES:
        out.extend(buckets[o][:n_per_objective])
    return out
