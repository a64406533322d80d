"""Classify rides against a threshold and rank stops for a field survey.

Uses a synthetic city with detours planted at a handful of problem
stops, classifies every ride, aggregates per boarding stop, and prints
the survey shortlist plus one interviewer report.
"""
from transitsurvey import (
    Objective,
    build_state_graph,
    build_transit_graph,
    build_survey_report,
    classify_ride,
    collect_stop_stats,
    rank_stops,
    report_text,
    route_metrics,
)
from transitsurvey.routing import OptimalRouteIndex
from transitsurvey.sim import SynthParams, generate_synthetic_city

LAMBDA = 1.0  # criterion units: km for distance-preferring riders, etc.

city = generate_synthetic_city(
    SynthParams(grid_rows=6, grid_cols=6, n_lines=12, line_len_range=(5, 10),
                n_riders=800, suboptimal_fraction=0.25, seed=20)
)
graph = build_transit_graph(city.network)
states = build_state_graph(city.network, city.times)
index = OptimalRouteIndex(graph, states)

records = []
origin_of = {}
for ride in city.rides:
    planted = city.planted[ride.rider_id]
    real = route_metrics(ride.real_route, city.network, city.times)
    opt = index.metrics(ride.origin, ride.destination, planted.criterion)
    records.append(
        classify_ride(ride.rider_id, planted.criterion,
                      real.value(planted.criterion), opt.value(planted.criterion), LAMBDA)
    )
    origin_of[ride.rider_id] = ride.origin

stats = collect_stop_stats(records, origin_of)
ranking = rank_stops(stats, min_sample=5)
print(f"top survey stops at threshold {LAMBDA} (criterion units):")
print(f"{'stop':<8} {'unsat':>6} {'sat':>6} {'P':>7}")
for s in ranking[:8]:
    print(f"{s.stop_id:<8} {s.qr:>6} {s.qb:>6} {s.probability:>7.2f}")

# write up the worst rider departing the top stop
top = ranking[0].stop_id
worst = max(
    (r for r in records if origin_of[r.rider_id] == top and r.verdict.value == "unsatisfactory"),
    key=lambda r: r.real_value - r.optimal_value,
)
ride = next(r for r in city.rides if r.rider_id == worst.rider_id)
k = worst.criterion
report = build_survey_report(
    ride,
    None,
    route_metrics(ride.real_route, city.network, city.times),
    index.route(ride.origin, ride.destination, k),
    index.metrics(ride.origin, ride.destination, k),
    LAMBDA,
    criterion=k,
)
print()
print(report_text(report))
