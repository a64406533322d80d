"""Bus-network ride analytics and survey-site targeting."""

from .graph import StateGraph, TransitGraph, build_state_graph, build_transit_graph
from .ingest import (
    GEODESIC,
    PLANAR,
    BusLine,
    LinkTimeTable,
    Network,
    NetworkError,
    RideError,
    RideRecord,
    Stop,
    estimate_link_times,
    load_network,
    load_rides,
)
from .preference import (
    AXES,
    ED,
    PI,
    KiviatPolygon,
    PreferenceResult,
    classify_preference,
    intersection_area,
    normalize_metrics,
    union_area,
)
from .quality import (
    SatisfactionRecord,
    StopStats,
    SurveyReport,
    Verdict,
    build_survey_report,
    classify_ride,
    classify_satisfaction,
    collect_stop_stats,
    heat_from_gaps,
    rank_stops,
    report_text,
    stop_probability,
)
from .routing import (
    CASCADE,
    EnumerationCapExceeded,
    Leg,
    Objective,
    OptimalRouteIndex,
    Route,
    RouteMetrics,
    brute_force_routes,
    optimal_route,
    route_metrics,
)
from .sim import (
    GenerationError,
    PlantedBehavior,
    PlantedRider,
    ScenarioResult,
    SynthParams,
    SyntheticCity,
    compute_criterion_gaps,
    evaluate_selection,
    generate_synthetic_city,
    planted_preference_population,
    run_scenarios,
)
from .api import AnalysisSnapshot, SnapshotError, build_snapshot, create_app, serve

__version__ = "0.1.0"

__all__ = [
    "AXES",
    "AnalysisSnapshot",
    "BusLine",
    "CASCADE",
    "ED",
    "EnumerationCapExceeded",
    "GEODESIC",
    "GenerationError",
    "KiviatPolygon",
    "Leg",
    "LinkTimeTable",
    "Network",
    "NetworkError",
    "Objective",
    "OptimalRouteIndex",
    "PI",
    "PLANAR",
    "PlantedBehavior",
    "PlantedRider",
    "PreferenceResult",
    "RideError",
    "RideRecord",
    "Route",
    "RouteMetrics",
    "SatisfactionRecord",
    "ScenarioResult",
    "SnapshotError",
    "StateGraph",
    "Stop",
    "StopStats",
    "SurveyReport",
    "SynthParams",
    "SyntheticCity",
    "TransitGraph",
    "Verdict",
    "brute_force_routes",
    "build_snapshot",
    "build_state_graph",
    "build_survey_report",
    "build_transit_graph",
    "classify_preference",
    "classify_ride",
    "classify_satisfaction",
    "collect_stop_stats",
    "compute_criterion_gaps",
    "create_app",
    "estimate_link_times",
    "evaluate_selection",
    "generate_synthetic_city",
    "heat_from_gaps",
    "intersection_area",
    "load_network",
    "load_rides",
    "normalize_metrics",
    "optimal_route",
    "planted_preference_population",
    "rank_stops",
    "report_text",
    "route_metrics",
    "run_scenarios",
    "serve",
    "stop_probability",
    "union_area",
]
