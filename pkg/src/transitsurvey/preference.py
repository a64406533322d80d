"""Rider preference inference.

A rider's observed route is compared with the four objective-optimal
alternatives on a four-axis radar polygon (distance, time, transfers,
hops). Two similarity methods are offered: polygon intersection area
(higher is more similar) and Euclidean distance between the normalized
metric vectors (lower is more similar).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .routing import CASCADE, Objective, RouteMetrics

#: Axis order around the polygon; frozen for reproducibility.
AXES = (Objective.DISTANCE, Objective.TIME, Objective.TRANSFERS, Objective.HOPS)

PI = "pi"
ED = "ed"

DEFAULT_TIE_TOLERANCE = 1e-9

Vec4 = tuple[float, float, float, float]
Point = tuple[float, float]


def normalize_metrics(route_set: Sequence[RouteMetrics]) -> list[Vec4]:
    """Scale each axis by its maximum over the compared routes.

    Values land in [0, 1]; an axis whose maximum is 0 maps to all zeros.
    """
    if not route_set:
        raise ValueError("route_set must be non-empty")
    vectors = [m.as_vector() for m in route_set]
    maxima = [max(v[i] for v in vectors) for i in range(4)]
    out = []
    for v in vectors:
        out.append(tuple(v[i] / maxima[i] if maxima[i] > 0 else 0.0 for i in range(4)))
    return out


@dataclass(frozen=True)
class KiviatPolygon:
    """Convex quadrilateral with one vertex per axis of a normalized vector."""

    vertices: tuple[Point, Point, Point, Point]

    @classmethod
    def from_normalized(cls, values: Vec4) -> "KiviatPolygon":
        d, t, x, h = values
        # counterclockwise: +x, +y, -x, -y axes
        return cls(((d, 0.0), (0.0, t), (-x, 0.0), (0.0, -h)))

    @property
    def area(self) -> float:
        return _shoelace(self.vertices)


def _shoelace(points: Sequence[Point]) -> float:
    if len(points) < 3:
        return 0.0
    acc = 0.0
    for (x0, y0), (x1, y1) in zip(points, list(points[1:]) + [points[0]]):
        acc += x0 * y1 - x1 * y0
    return abs(acc) / 2.0


def _clip(subject: Sequence[Point], clip: Sequence[Point]) -> list[Point]:
    # Sutherland-Hodgman; the clip polygon must be convex and counterclockwise.
    output = list(subject)
    cp1 = clip[-1]
    for cp2 in clip:
        if not output:
            return []
        edge_dx, edge_dy = cp2[0] - cp1[0], cp2[1] - cp1[1]

        def inside(p: Point) -> bool:
            return edge_dx * (p[1] - cp1[1]) - edge_dy * (p[0] - cp1[0]) >= 0.0

        def intersection(s: Point, e: Point) -> Point:
            dcx, dcy = cp1[0] - cp2[0], cp1[1] - cp2[1]
            dpx, dpy = s[0] - e[0], s[1] - e[1]
            n1 = cp1[0] * cp2[1] - cp1[1] * cp2[0]
            n2 = s[0] * e[1] - s[1] * e[0]
            den = dcx * dpy - dcy * dpx
            return ((n1 * dpx - n2 * dcx) / den, (n1 * dpy - n2 * dcy) / den)

        inputs, output = output, []
        s = inputs[-1]
        for e in inputs:
            if inside(e):
                if not inside(s):
                    output.append(intersection(s, e))
                output.append(e)
            elif inside(s):
                output.append(intersection(s, e))
            s = e
        cp1 = cp2
    return output


def intersection_area(a: KiviatPolygon, b: KiviatPolygon) -> float:
    """Exact area of the intersection of two polygons; commutative."""
    area_a, area_b = a.area, b.area
    if area_a == 0.0 or area_b == 0.0:
        return 0.0
    # Clip deterministically (smaller subject into larger clip) so the
    # argument order cannot change the floating-point result.
    first, second = (a, b) if (area_a, a.vertices) <= (area_b, b.vertices) else (b, a)
    return _shoelace(_clip(first.vertices, second.vertices))


def union_area(a: KiviatPolygon, b: KiviatPolygon) -> float:
    return a.area + b.area - intersection_area(a, b)


@dataclass(frozen=True)
class PreferenceResult:
    """Inferred preferred criterion with per-objective similarity scores."""

    method: str
    scores: dict[Objective, float]
    preferred: Objective
    tied: tuple[Objective, ...]
    rider_id: str | None = None

    @property
    def ambiguous(self) -> bool:
        """More than one objective scored within tolerance of the best."""
        return len(self.tied) > 1


def _euclidean(a: Vec4, b: Vec4) -> float:
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))


def classify_preference(
    real: RouteMetrics,
    optimal: Mapping[Objective, RouteMetrics],
    method: str = PI,
    tie_tolerance: float = DEFAULT_TIE_TOLERANCE,
    use_iou: bool = False,
    rider_id: str | None = None,
) -> PreferenceResult:
    """Infer which objective the observed route most closely follows.

    PI scores each objective by the intersection area between the real
    route's polygon and that objective's optimal polygon (higher wins);
    ED scores by Euclidean distance between normalized metric vectors
    (lower wins). Objectives within tie_tolerance of the best are
    reported tied and resolved by the cascade order.
    """
    if method not in (PI, ED):
        raise ValueError(f"unknown method {method!r}")
    missing = [o for o in Objective if o not in optimal]
    if missing:
        raise ValueError(f"optimal routes missing for: {[o.value for o in missing]}")

    ordered = [real] + [optimal[o] for o in AXES]
    normalized = normalize_metrics(ordered)
    real_n = normalized[0]
    opt_n = dict(zip(AXES, normalized[1:]))

    scores: dict[Objective, float] = {}
    if method == PI:
        real_poly = KiviatPolygon.from_normalized(real_n)
        for obj in AXES:
            poly = KiviatPolygon.from_normalized(opt_n[obj])
            inter = intersection_area(real_poly, poly)
            if use_iou:
                union = union_area(real_poly, poly)
                scores[obj] = inter / union if union > 0 else 0.0
            else:
                scores[obj] = inter
        best = max(scores.values())
    else:
        for obj in AXES:
            scores[obj] = _euclidean(real_n, opt_n[obj])
        best = min(scores.values())

    tied = tuple(o for o in CASCADE if abs(scores[o] - best) <= tie_tolerance)
    return PreferenceResult(
        method=method,
        scores=scores,
        preferred=tied[0],
        tied=tied,
        rider_id=rider_id,
    )
