"""Ride satisfaction classification and problem-stop ranking.

A ride is unsatisfactory when its criterion value exceeds the optimal
alternative's by at least the analyst's threshold. Per-stop counts of
unsatisfied vs satisfied departures yield the probability used to rank
survey sites, and unsatisfied riders get printable route-comparison
reports for the field interviewer.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Iterable, Mapping

from .routing import Objective, Route, RouteMetrics, route_dump

if TYPE_CHECKING:
    from .ingest import RideRecord
    from .preference import PreferenceResult

#: Slack for the sanity check that the optimal value really is optimal.
OPTIMALITY_EPS = 1e-9

DEFAULT_MIN_SAMPLE = 5

#: Threshold units depend on the criterion the threshold applies to.
LAMBDA_UNITS = {
    Objective.DISTANCE: "km",
    Objective.TIME: "s",
    Objective.TRANSFERS: "transfers",
    Objective.HOPS: "hops",
}


class Verdict(str, Enum):
    SATISFACTORY = "satisfactory"
    UNSATISFACTORY = "unsatisfactory"


def classify_satisfaction(real_value: float, optimal_value: float, lam: float) -> Verdict:
    """Classify one ride: unsatisfactory iff real - optimal >= lambda.

    The boundary is closed: a gap exactly equal to lambda is
    unsatisfactory.
    """
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    if real_value < optimal_value - OPTIMALITY_EPS:
        raise ValueError(
            f"real value {real_value} beats the supposed optimum {optimal_value}; "
            "upstream routing is broken"
        )
    diff = real_value - optimal_value
    return Verdict.UNSATISFACTORY if diff >= lam else Verdict.SATISFACTORY


@dataclass(frozen=True)
class SatisfactionRecord:
    rider_id: str
    criterion: Objective
    real_value: float
    optimal_value: float
    lam: float
    verdict: Verdict


def classify_ride(
    rider_id: str, criterion: Objective, real_value: float, optimal_value: float, lam: float
) -> SatisfactionRecord:
    verdict = classify_satisfaction(real_value, optimal_value, lam)
    return SatisfactionRecord(rider_id, criterion, real_value, optimal_value, lam, verdict)


@dataclass(frozen=True)
class StopStats:
    """Satisfied/unsatisfied departure counts for one stop."""

    stop_id: str
    qr: int  # unsatisfied departures
    qb: int  # satisfied departures

    @property
    def total(self) -> int:
        return self.qr + self.qb

    @property
    def probability(self) -> float:
        """Chance a departing rider is unsatisfied; 0 for an empty stop."""
        return self.qr / self.total if self.total > 0 else 0.0


def stop_probability(stop_id: str, records: Iterable[SatisfactionRecord]) -> StopStats:
    """Aggregate one stop's records into counts and probability."""
    qr = qb = 0
    for rec in records:
        if rec.verdict is Verdict.UNSATISFACTORY:
            qr += 1
        else:
            qb += 1
    return StopStats(stop_id, qr, qb)


def collect_stop_stats(
    records: Iterable[SatisfactionRecord], origin_of: Mapping[str, str]
) -> list[StopStats]:
    """Group records by each rider's boarding stop and aggregate."""
    grouped: dict[str, list[SatisfactionRecord]] = {}
    for rec in records:
        grouped.setdefault(origin_of[rec.rider_id], []).append(rec)
    return [stop_probability(stop, recs) for stop, recs in grouped.items()]


def rank_stops(stats: Iterable[StopStats], min_sample: int = DEFAULT_MIN_SAMPLE) -> list[StopStats]:
    """Stops worth surveying first.

    Keeps stops with at least min_sample departures, ordered by
    probability descending, then unsatisfied count descending, then
    stop id.
    """
    kept = [s for s in stats if s.total >= min_sample]
    kept.sort(key=lambda s: (-s.probability, -s.qr, s.stop_id))
    return kept


@dataclass(frozen=True)
class SurveyReport:
    """Interviewer hand-out: observed route vs the criterion optimum."""

    rider_id: str
    origin: str
    destination: str
    criterion: Objective
    real_route: Route
    real_metrics: RouteMetrics
    optimal_route: Route
    optimal_metrics: RouteMetrics
    difference: float
    steps: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "rider_id": self.rider_id,
            "origin": self.origin,
            "destination": self.destination,
            "criterion": self.criterion.value,
            "real": route_dump(self.real_route, self.real_metrics),
            "optimal": route_dump(self.optimal_route, self.optimal_metrics),
            "difference": self.difference,
            "difference_units": LAMBDA_UNITS[self.criterion],
            "steps": list(self.steps),
        }


def build_survey_report(
    ride: "RideRecord",
    preference: "PreferenceResult | None",
    real_metrics: RouteMetrics,
    optimal_route: Route,
    optimal_metrics: RouteMetrics,
    lam: float,
    criterion: Objective | None = None,
) -> SurveyReport:
    """Assemble the report for one unsatisfied rider.

    The criterion defaults to the rider's inferred preference; passing
    one explicitly overrides it. Satisfied rides are rejected: reports
    exist to brief interviewers on survey targets.
    """
    if criterion is None:
        if preference is None:
            raise ValueError("need either an inferred preference or an explicit criterion")
        criterion = preference.preferred
    real_value = real_metrics.value(criterion)
    optimal_value = optimal_metrics.value(criterion)
    verdict = classify_satisfaction(real_value, optimal_value, lam)
    if verdict is Verdict.SATISFACTORY:
        raise ValueError(f"rider {ride.rider_id} is satisfied at lambda={lam}; no report due")
    steps = tuple(
        f"board line {leg.line_id} at {leg.board}, alight at {leg.alight}"
        for leg in optimal_route.legs
    )
    return SurveyReport(
        rider_id=ride.rider_id,
        origin=ride.origin,
        destination=ride.destination,
        criterion=criterion,
        real_route=ride.real_route,
        real_metrics=real_metrics,
        optimal_route=optimal_route,
        optimal_metrics=optimal_metrics,
        difference=real_value - optimal_value,
        steps=steps,
    )


def report_text(report: SurveyReport) -> str:
    """Plain-text rendering of a survey report."""
    units = LAMBDA_UNITS[report.criterion]

    def describe(label: str, route: Route, metrics: RouteMetrics) -> list[str]:
        lines = [f"{label}:"]
        lines.append(f"  lines: {' -> '.join(leg.line_id for leg in route.legs)}")
        lines.append(
            f"  distance {metrics.distance_km:.2f} km | time {metrics.time_s:.0f} s"
            f" | transfers {metrics.transfers} | stops ridden {metrics.hops}"
        )
        return lines

    out = [
        f"Survey report for rider {report.rider_id}",
        f"Trip: {report.origin} -> {report.destination}",
        f"Criterion: {report.criterion.value}"
        f" (difference {report.difference:g} {units})",
        "",
    ]
    out += describe("Observed route", report.real_route, report.real_metrics)
    out += describe("Suggested route", report.optimal_route, report.optimal_metrics)
    out.append("")
    out.append("Suggested steps:")
    out += [f"  {i}. {step}" for i, step in enumerate(report.steps, start=1)]
    return "\n".join(out) + "\n"


def heat_from_gaps(
    rider_gaps: Iterable[tuple[str, str, float]], lam: float, min_sample: int = DEFAULT_MIN_SAMPLE
) -> list[StopStats]:
    """Rank stops from precomputed (rider, origin stop, criterion gap) rows.

    This is the single aggregation path shared by the batch pipeline and
    the query API so both always agree for any lambda.
    """
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    grouped: dict[str, list[bool]] = {}
    for _rider, origin, gap in rider_gaps:
        grouped.setdefault(origin, []).append(gap >= lam)
    stats = [
        StopStats(stop, qr=sum(flags), qb=len(flags) - sum(flags))
        for stop, flags in grouped.items()
    ]
    return rank_stops(stats, min_sample)
