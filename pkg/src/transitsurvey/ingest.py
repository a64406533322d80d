"""Loading and validation of network, ride, and vehicle-trace data.

File formats:
  stops  CSV   stop_id,lat,lon,is_terminal   (planar: stop_id,x_km,y_km,is_terminal)
  lines  CSV   line_id,seq,stop_id           (seq ascending from 0 per line)
  rides  JSONL {"rider_id","origin","destination","legs":[{"line","board","alight"}],"timestamp"}
  gps    CSV   vehicle_id,line_id,lat,lon,timestamp_s
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Union

from .routing import Leg, Route

EARTH_RADIUS_KM = 6371.0088
GPS_MATCH_RADIUS_KM = 0.05  # a vehicle "passes" a stop within 50 m

GEODESIC = "geodesic"
PLANAR = "planar"

Source = Union[str, Path, IO[str]]


class NetworkError(ValueError):
    """Network source data violates an invariant."""


class RideError(ValueError):
    """A ride record failed validation (raised in strict mode only)."""


def haversine_km(a: tuple[float, float], b: tuple[float, float]) -> float:
    lat1, lon1 = math.radians(a[0]), math.radians(a[1])
    lat2, lon2 = math.radians(b[0]), math.radians(b[1])
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = math.sin(dlat / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2) ** 2
    return 2 * EARTH_RADIUS_KM * math.asin(math.sqrt(h))


def euclidean_km(a: tuple[float, float], b: tuple[float, float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


@dataclass(frozen=True)
class Stop:
    stop_id: str
    coord: tuple[float, float]  # (lat, lon) geodesic, (x_km, y_km) planar
    is_terminal: bool = False


@dataclass(frozen=True)
class BusLine:
    line_id: str
    itinerary: tuple[str, ...]


@dataclass(frozen=True)
class Network:
    stops: dict[str, Stop]
    lines: dict[str, BusLine]
    coordinate_mode: str = PLANAR

    @classmethod
    def build(
        cls,
        stops: Iterable[Stop],
        lines: Iterable[BusLine],
        coordinate_mode: str = PLANAR,
    ) -> "Network":
        """Validate and assemble a network; raises NetworkError on bad data."""
        if coordinate_mode not in (GEODESIC, PLANAR):
            raise NetworkError(f"unknown coordinate mode {coordinate_mode!r}")
        stop_map: dict[str, Stop] = {}
        for stop in stops:
            if stop.stop_id in stop_map:
                raise NetworkError(f"duplicate stop_id {stop.stop_id!r}")
            if not all(math.isfinite(c) for c in stop.coord):
                raise NetworkError(f"stop {stop.stop_id!r} has non-finite coordinates")
            stop_map[stop.stop_id] = stop
        line_map: dict[str, BusLine] = {}
        for line in lines:
            if line.line_id in line_map:
                raise NetworkError(f"duplicate line_id {line.line_id!r}")
            if len(line.itinerary) < 2:
                raise NetworkError(f"line {line.line_id!r} itinerary shorter than 2 stops")
            for stop_id in line.itinerary:
                if stop_id not in stop_map:
                    raise NetworkError(f"line {line.line_id!r} references unknown stop {stop_id!r}")
            for u, v in zip(line.itinerary, line.itinerary[1:]):
                if u == v:
                    raise NetworkError(f"line {line.line_id!r} repeats stop {u!r} consecutively")
            line_map[line.line_id] = line
        if not stop_map or not line_map:
            raise NetworkError("network must contain at least one stop and one line")
        return cls(stops=stop_map, lines=line_map, coordinate_mode=coordinate_mode)

    def distance_km(self, a: str, b: str) -> float:
        ca, cb = self.stops[a].coord, self.stops[b].coord
        if self.coordinate_mode == GEODESIC:
            return haversine_km(ca, cb)
        return euclidean_km(ca, cb)

    def to_dict(self) -> dict:
        return {
            "coordinate_mode": self.coordinate_mode,
            "stops": [
                {
                    "stop_id": s.stop_id,
                    "lat": s.coord[0],
                    "lon": s.coord[1],
                    "is_terminal": s.is_terminal,
                }
                for s in sorted(self.stops.values(), key=lambda s: s.stop_id)
            ],
            "lines": [
                {"line_id": l.line_id, "itinerary": list(l.itinerary)}
                for l in sorted(self.lines.values(), key=lambda l: l.line_id)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Network":
        stops = [
            Stop(d["stop_id"], (float(d["lat"]), float(d["lon"])), bool(d["is_terminal"]))
            for d in data["stops"]
        ]
        lines = [BusLine(d["line_id"], tuple(d["itinerary"])) for d in data["lines"]]
        return cls.build(stops, lines, data["coordinate_mode"])


@dataclass(frozen=True)
class RideRecord:
    rider_id: str
    origin: str
    destination: str
    real_route: Route
    timestamp: float | None = None

    def to_dict(self) -> dict:
        out: dict = {
            "rider_id": self.rider_id,
            "origin": self.origin,
            "destination": self.destination,
            "legs": [
                {"line": leg.line_id, "board": leg.board, "alight": leg.alight}
                for leg in self.real_route.legs
            ],
        }
        if self.timestamp is not None:
            out["timestamp"] = self.timestamp
        return out


@dataclass
class LinkTimeTable:
    """Mean traversal seconds per (line, from_stop, to_stop) link.

    Lookup is total: links without observations fall back to
    link length / default speed.
    """

    times: dict[tuple[str, str, str], float] = field(default_factory=dict)
    default_speed_kmh: float = 20.0
    transfer_wait_s: float = 300.0

    def link_time_s(self, line_id: str, from_stop: str, to_stop: str, length_km: float) -> float:
        stored = self.times.get((line_id, from_stop, to_stop))
        if stored is not None:
            return stored
        return length_km / self.default_speed_kmh * 3600.0

    def to_dict(self) -> dict:
        return {
            "default_speed_kmh": self.default_speed_kmh,
            "transfer_wait_s": self.transfer_wait_s,
            "links": [
                {"line": k[0], "from": k[1], "to": k[2], "mean_s": v}
                for k, v in sorted(self.times.items())
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LinkTimeTable":
        return cls(
            times={(d["line"], d["from"], d["to"]): float(d["mean_s"]) for d in data["links"]},
            default_speed_kmh=float(data["default_speed_kmh"]),
            transfer_wait_s=float(data["transfer_wait_s"]),
        )


def _rows(source: Source) -> Iterable[dict]:
    if hasattr(source, "read"):
        yield from csv.DictReader(source)
    else:
        with open(source, newline="") as fh:
            yield from csv.DictReader(fh)


def _text_lines(source: Source) -> Iterable[str]:
    if hasattr(source, "read"):
        yield from source
    else:
        with open(source) as fh:
            yield from fh

def _parse_bool(raw: str) -> bool:
    return raw.strip().lower() in ("1", "true", "yes", "t")


def load_network(stops_source: Source, lines_source: Source, mode: str = PLANAR) -> Network:
    """Parse stop and line tables into a validated Network.

    Any duplicate stop, unknown stop reference, or sub-2-stop itinerary
    rejects the whole load with the offending record named.
    """
    coord_cols = ("lat", "lon") if mode == GEODESIC else ("x_km", "y_km")
    stops = []
    for row in _rows(stops_source):
        try:
            coord = (float(row[coord_cols[0]]), float(row[coord_cols[1]]))
        except (KeyError, TypeError, ValueError) as exc:
            raise NetworkError(f"bad stop row {row!r}: {exc}") from exc
        stops.append(Stop(row["stop_id"], coord, _parse_bool(row.get("is_terminal", ""))))

    by_line: dict[str, list[tuple[int, str]]] = {}
    for row in _rows(lines_source):
        try:
            seq = int(row["seq"])
        except (KeyError, TypeError, ValueError) as exc:
            raise NetworkError(f"bad line row {row!r}: {exc}") from exc
        by_line.setdefault(row["line_id"], []).append((seq, row["stop_id"]))
    lines = []
    for line_id, entries in by_line.items():
        entries.sort()
        seqs = [s for s, _ in entries]
        if seqs != list(range(len(entries))):
            raise NetworkError(f"line {line_id!r} seq values must run 0..{len(entries) - 1}")
        lines.append(BusLine(line_id, tuple(stop for _, stop in entries)))
    return Network.build(stops, lines, mode)


def derive_leg(network: Network, line_id: str, board: str, alight: str) -> Leg:
    """Expand a (line, board, alight) triple to the traversed stops."""
    line = network.lines.get(line_id)
    if line is None:
        raise RideError(f"unknown line {line_id!r}")
    itinerary = line.itinerary
    for i, stop in enumerate(itinerary):
        if stop != board:
            continue
        for j in range(i + 1, len(itinerary)):
            if itinerary[j] == alight:
                return Leg(line_id, board, alight, tuple(itinerary[i : j + 1]))
    raise RideError(f"line {line_id!r} does not run {board!r} -> {alight!r} in order")


def load_rides(
    rides_source: Source, network: Network, strict: bool = False
) -> tuple[list[RideRecord], list[str]]:
    """Parse ride records, validating leg chaining and line membership.

    Bad records are skipped and reported in the second return value;
    with strict=True the first bad record aborts the load.
    """
    rides: list[RideRecord] = []
    rejected: list[str] = []
    seen: set[str] = set()

    def fail(msg: str) -> None:
        if strict:
            raise RideError(msg)
        rejected.append(msg)

    for lineno, raw in enumerate(_text_lines(rides_source), start=1):
        raw = raw.strip()
        if not raw:
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            fail(f"line {lineno}: not valid JSON ({exc})")
            continue
        rider = obj.get("rider_id", f"<line {lineno}>")
        try:
            legs = [derive_leg(network, d["line"], d["board"], d["alight"]) for d in obj["legs"]]
            if not legs:
                raise RideError("no legs")
            route = Route(tuple(legs))
        except (RideError, ValueError, KeyError, TypeError) as exc:
            fail(f"rider {rider}: {exc}")
            continue
        if obj["origin"] != route.origin or obj["destination"] != route.destination:
            fail(f"rider {rider}: route does not run {obj['origin']}->{obj['destination']}")
            continue
        if rider in seen:
            fail(f"rider {rider}: duplicate rider_id")
            continue
        seen.add(rider)
        ts = obj.get("timestamp")
        rides.append(
            RideRecord(rider, obj["origin"], obj["destination"], route,
                       float(ts) if ts is not None else None)
        )
    return rides, rejected


def estimate_link_times(
    gps_source: Source,
    network: Network,
    default_speed_kmh: float = 20.0,
    transfer_wait_s: float = 300.0,
) -> tuple[LinkTimeTable, int]:
    """Estimate per-link traversal times from vehicle position traces.

    A vehicle pass matches itinerary stops in order within the 50 m
    geofence; the traversal time of a link is the difference between
    first-pass times at its two stops, averaged over all passes. Passes
    with non-increasing timestamps are discarded whole. Returns the table
    and the count of skipped (unparseable) records.
    """
    observations: dict[tuple[str, str, str], list[float]] = {}
    skipped = 0
    # (vehicle, line) -> records kept in file order
    groups: dict[tuple[str, str], list[tuple[tuple[float, float], float]]] = {}
    for row in _rows(gps_source):
        try:
            line_id = row["line_id"]
            if line_id not in network.lines:
                raise ValueError(f"unknown line {line_id!r}")
            pos = (float(row["lat"]), float(row["lon"]))
            t = float(row["timestamp_s"])
        except (KeyError, TypeError, ValueError):
            skipped += 1
            continue
        groups.setdefault((row["vehicle_id"], line_id), []).append((pos, t))

    def dist(a: tuple[float, float], b: tuple[float, float]) -> float:
        if network.coordinate_mode == GEODESIC:
            return haversine_km(a, b)
        return euclidean_km(a, b)

    def flush(line_id: str, matched: list[tuple[int, float]], valid: bool) -> None:
        if not valid or len(matched) < 2:
            return
        itinerary = network.lines[line_id].itinerary
        for (i, t1), (j, t2) in zip(matched, matched[1:]):
            if j == i + 1:
                observations.setdefault((line_id, itinerary[i], itinerary[j]), []).append(t2 - t1)

    for (_vehicle, line_id), records in sorted(groups.items()):
        itinerary = network.lines[line_id].itinerary
        stop_coords = [network.stops[s].coord for s in itinerary]
        matched: list[tuple[int, float]] = []
        valid = True
        k = 0
        for pos, t in records:
            if matched and t <= matched[-1][1]:
                valid = False  # out-of-order pass: discard it whole
            if k < len(itinerary) and dist(pos, stop_coords[k]) <= GPS_MATCH_RADIUS_KM:
                matched.append((k, t))
                k += 1
                if k == len(itinerary):
                    flush(line_id, matched, valid)
                    matched, valid, k = [], True, 0
            elif k > 0 and dist(pos, stop_coords[0]) <= GPS_MATCH_RADIUS_KM:
                flush(line_id, matched, valid)  # vehicle restarted the route
                matched, valid, k = [(0, t)], True, 1
        flush(line_id, matched, valid)

    table = LinkTimeTable(
        times={},
        default_speed_kmh=default_speed_kmh,
        transfer_wait_s=transfer_wait_s,
    )
    for key, obs in observations.items():
        mean = sum(obs) / len(obs)
        if mean > 0:
            table.times[key] = mean
    return table, skipped
