"""Route search over bus networks.

Finds the best itinerary between two stops for each of four convenience
objectives (distance, time, transfers, hops), with a deterministic
tie-break cascade, and provides an exhaustive enumerator used as an
independent oracle in tests.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

from .graph import ALIGHT, BOARD, RIDE, TRANSFER

if TYPE_CHECKING:
    from .graph import StateGraph, TransitGraph
    from .ingest import LinkTimeTable, Network


class Objective(str, Enum):
    """The four route-convenience criteria."""

    DISTANCE = "distance"
    TIME = "time"
    TRANSFERS = "transfers"
    HOPS = "hops"


#: Tie-break order applied whenever candidate routes score equal on the
#: active objective: fewer transfers, then faster, shorter, fewer hops,
#: then lexicographically smallest (line, board stop) sequence.
CASCADE = (Objective.TRANSFERS, Objective.TIME, Objective.DISTANCE, Objective.HOPS)

#: Transfers beyond this are not considered unless the caller widens it.
DEFAULT_MAX_TRANSFERS = 3


class EnumerationCapExceeded(RuntimeError):
    """Exhaustive route enumeration hit its safety cap."""


@dataclass(frozen=True)
class Leg:
    """One boarded segment of a trip: board a line, ride, alight."""

    line_id: str
    board: str
    alight: str
    stop_sequence: tuple[str, ...]

    def __post_init__(self):
        if len(self.stop_sequence) < 2:
            raise ValueError(f"leg on {self.line_id} must cover at least one link")
        if self.stop_sequence[0] != self.board or self.stop_sequence[-1] != self.alight:
            raise ValueError(f"leg endpoints do not match its stop sequence: {self}")

    @property
    def hops(self) -> int:
        return len(self.stop_sequence) - 1


@dataclass(frozen=True)
class Route:
    """An itinerary: one or more legs chained board-to-alight."""

    legs: tuple[Leg, ...]

    def __post_init__(self):
        if not self.legs:
            raise ValueError("route needs at least one leg")
        for a, b in zip(self.legs, self.legs[1:]):
            if a.alight != b.board:
                raise ValueError(f"legs do not chain: {a.alight} != {b.board}")

    @property
    def origin(self) -> str:
        return self.legs[0].board

    @property
    def destination(self) -> str:
        return self.legs[-1].alight


@dataclass(frozen=True)
class RouteMetrics:
    """Criterion values of one route."""

    distance_km: float
    time_s: float
    transfers: int
    hops: int

    def value(self, objective: Objective) -> float:
        return {
            Objective.DISTANCE: self.distance_km,
            Objective.TIME: self.time_s,
            Objective.TRANSFERS: float(self.transfers),
            Objective.HOPS: float(self.hops),
        }[objective]

    def as_vector(self) -> tuple[float, float, float, float]:
        """(distance, time, transfers, hops), the fixed axis order."""
        return (self.distance_km, self.time_s, float(self.transfers), float(self.hops))


def route_dump(route: Route, metrics: RouteMetrics | None = None) -> dict:
    """JSON-ready form of a route (and optionally its metrics)."""
    out: dict = {
        "legs": [
            {
                "line": leg.line_id,
                "board": leg.board,
                "alight": leg.alight,
                "stops": list(leg.stop_sequence),
            }
            for leg in route.legs
        ]
    }
    if metrics is not None:
        out["metrics"] = {
            "distance_km": metrics.distance_km,
            "time_s": metrics.time_s,
            "transfers": metrics.transfers,
            "hops": metrics.hops,
        }
    return out


def route_from_dict(data: dict) -> Route:
    return Route(
        tuple(
            Leg(d["line"], d["board"], d["alight"], tuple(d["stops"]))
            for d in data["legs"]
        )
    )


def metrics_from_dict(data: dict) -> RouteMetrics:
    return RouteMetrics(
        distance_km=float(data["distance_km"]),
        time_s=float(data["time_s"]),
        transfers=int(data["transfers"]),
        hops=int(data["hops"]),
    )


def route_metrics(route: Route, network: "Network", times: "LinkTimeTable") -> RouteMetrics:
    """Compute the four criterion values of a route.

    Distance and ride time are sums over traversed links; each transfer
    adds the table's constant wait; hops count traversed links.
    """
    distance = 0.0
    ride_time = 0.0
    hops = 0
    for leg in route.legs:
        line = network.lines.get(leg.line_id)
        if line is None:
            raise ValueError(f"unknown line {leg.line_id!r}")
        if not _is_contiguous(leg.stop_sequence, line.itinerary):
            raise ValueError(
                f"leg {leg.board}->{leg.alight} is not a contiguous section of {leg.line_id}"
            )
        for u, v in zip(leg.stop_sequence, leg.stop_sequence[1:]):
            length = network.distance_km(u, v)
            distance += length
            ride_time += times.link_time_s(leg.line_id, u, v, length)
            hops += 1
    transfers = len(route.legs) - 1
    return RouteMetrics(
        distance_km=distance,
        time_s=ride_time + transfers * times.transfer_wait_s,
        transfers=transfers,
        hops=hops,
    )


def _is_contiguous(seq: tuple[str, ...], itinerary: tuple[str, ...]) -> bool:
    n = len(seq)
    for i in range(len(itinerary) - n + 1):
        if itinerary[i : i + n] == seq:
            return True
    return False


# ---------------------------------------------------------------------------
# Optimal-route search.
#
# All four objectives run as one label-setting search over the state graph
# with a lexicographic cost (objective, transfers, time, distance, hops),
# which bakes the tie-break cascade into the search itself. A transfer cap
# is handled by searching the product of states with transfers-used levels.
# ---------------------------------------------------------------------------

_Cost = tuple[float, float, float, float, float]
_ZERO: _Cost = (0.0, 0.0, 0.0, 0.0, 0.0)


def _arc_cost(arc, objective: Objective) -> _Cost:
    if arc.kind == RIDE:
        tr, ti, di, ho = 0.0, arc.time_s, arc.length_km, 1.0
    elif arc.kind == TRANSFER:
        tr, ti, di, ho = 1.0, arc.time_s, 0.0, 0.0
    else:  # board / alight
        tr, ti, di, ho = 0.0, 0.0, 0.0, 0.0
    primary = {
        Objective.DISTANCE: di,
        Objective.TIME: ti,
        Objective.TRANSFERS: tr,
        Objective.HOPS: ho,
    }[objective]
    return (primary, tr, ti, di, ho)


def _add(a: _Cost, b: _Cost) -> _Cost:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3], a[4] + b[4])


def _search(
    sg: "StateGraph",
    origin: str,
    objective: Objective,
    max_transfers: int,
    destination: str | None = None,
    with_sig: bool = True,
):
    """Label-setting search from a stop's virtual source.

    Returns (settled, target_key). `settled` maps (node, transfers_used)
    to (cost, sig, parent_key, arc). When `destination` is given the
    search stops at the first settling of its sink, which by pop order is
    the cascade-minimal label over all transfer levels.
    """
    src = sg.source_of[origin]
    target = sg.sink_of[destination] if destination is not None else None
    empty_sig: tuple = ()
    heap = [(_ZERO, empty_sig, src, 0, 0, -1, -1, None)]
    best: dict[tuple[int, int], tuple] = {(src, 0): (_ZERO, empty_sig)}
    settled: dict[tuple[int, int], tuple] = {}
    counter = 0
    while heap:
        cost, sig, node, level, _, pnode, plevel, arc = heapq.heappop(heap)
        key = (node, level)
        if key in settled:
            continue
        parent = (pnode, plevel) if pnode >= 0 else None
        settled[key] = (cost, sig, parent, arc)
        if target is not None and node == target:
            return settled, key
        for out in sg.out_arcs[node]:
            nlevel = level + 1 if out.kind == TRANSFER else level
            if nlevel > max_transfers:
                continue
            nkey = (out.dst, nlevel)
            if nkey in settled:
                continue
            ncost = _add(cost, _arc_cost(out, objective))
            if with_sig and out.kind == BOARD:
                nsig = sig + ((sg.state_line[out.dst], sg.state_stop[out.dst]),)
            else:
                nsig = sig
            cand = (ncost, nsig)
            if nkey not in best or cand < best[nkey]:
                best[nkey] = cand
                counter += 1
                heapq.heappush(heap, (ncost, nsig, out.dst, nlevel, counter, node, level, out))
    return settled, None


def _route_from_settled(sg: "StateGraph", settled: dict, end_key) -> Route:
    chain = []
    key = end_key
    while key is not None:
        cost, sig, parent, arc = settled[key]
        if arc is not None:
            chain.append((arc, key[0]))
        key = parent
    chain.reverse()
    legs: list[Leg] = []
    line_id = ""
    board_pos = -1
    pos = -1
    for arc, dst in chain:
        if arc.kind == BOARD:
            line_id = sg.state_line[dst]
            pos = sg.state_pos[dst]
            board_pos = pos
        elif arc.kind == RIDE:
            pos = sg.state_pos[dst]
        elif arc.kind == ALIGHT:
            itinerary = sg.itineraries[line_id]
            if pos <= board_pos:
                raise RuntimeError("internal error: search produced an empty leg")
            legs.append(
                Leg(
                    line_id,
                    itinerary[board_pos],
                    itinerary[pos],
                    tuple(itinerary[board_pos : pos + 1]),
                )
            )
    return Route(tuple(legs))


def _best_sink_key(sg: "StateGraph", settled: dict, stop_id: str):
    sink = sg.sink_of[stop_id]
    candidates = [
        (label[0], label[1], key)
        for key, label in settled.items()
        if key[0] == sink
    ]
    if not candidates:
        return None
    return min(candidates)[2]


def _metrics_from_cost(cost: _Cost) -> RouteMetrics:
    return RouteMetrics(
        distance_km=cost[3],
        time_s=cost[2],
        transfers=int(round(cost[1])),
        hops=int(round(cost[4])),
    )


def _check_od(graph: "TransitGraph", origin: str, destination: str) -> None:
    if origin == destination:
        raise ValueError("origin and destination must differ")
    for stop in (origin, destination):
        if stop not in graph.nodes:
            raise ValueError(f"unknown stop {stop!r}")


def optimal_route(
    graph: "TransitGraph",
    state_graph: "StateGraph",
    origin: str,
    destination: str,
    objective: Objective,
    max_transfers: int = DEFAULT_MAX_TRANSFERS,
) -> Route | None:
    """Best route from origin to destination under one objective.

    Among all routes minimizing the objective, returns the one preferred
    by the tie-break cascade. Returns None when no route exists within
    the transfer cap.
    """
    _check_od(graph, origin, destination)
    settled, end_key = _search(state_graph, origin, objective, max_transfers, destination)
    if end_key is None:
        return None
    return _route_from_settled(state_graph, settled, end_key)


class OptimalRouteIndex:
    """Caches single-source searches so bulk OD queries stay cheap.

    Criterion values for every reachable destination of an origin come
    from one search and are cached permanently; full parent tables for
    route reconstruction are heavier and kept in a small LRU.
    """

    def __init__(
        self,
        graph: "TransitGraph",
        state_graph: "StateGraph",
        max_transfers: int = DEFAULT_MAX_TRANSFERS,
        table_cache: int = 8,
    ):
        self.graph = graph
        self.sg = state_graph
        self.max_transfers = max_transfers
        self._values: dict[tuple[str, Objective], dict[str, _Cost]] = {}
        self._tables: dict[tuple[str, Objective], dict] = {}
        self._table_cache = table_cache

    def values(self, origin: str, objective: Objective) -> dict[str, _Cost]:
        """Per-destination optimal cost vectors from one origin."""
        key = (origin, objective)
        cached = self._values.get(key)
        if cached is None:
            settled, _ = _search(self.sg, origin, objective, self.max_transfers, with_sig=False)
            cached = {}
            for (node, _level), (cost, _sig, _p, _a) in settled.items():
                stop = self.sg.sink_stop.get(node)
                if stop is None or stop == origin:
                    continue
                if stop not in cached or cost < cached[stop]:
                    cached[stop] = cost
            self._values[key] = cached
        return cached

    def metrics(self, origin: str, destination: str, objective: Objective) -> RouteMetrics | None:
        cost = self.values(origin, objective).get(destination)
        return None if cost is None else _metrics_from_cost(cost)

    def route(self, origin: str, destination: str, objective: Objective) -> Route | None:
        settled = self._table(origin, objective)
        end_key = _best_sink_key(self.sg, settled, destination)
        if end_key is None:
            return None
        return _route_from_settled(self.sg, settled, end_key)

    def _table(self, origin: str, objective: Objective) -> dict:
        key = (origin, objective)
        table = self._tables.get(key)
        if table is None:
            table, _ = _search(self.sg, origin, objective, self.max_transfers)
            if len(self._tables) >= self._table_cache:
                self._tables.pop(next(iter(self._tables)))
            self._tables[key] = table
        return table


# ---------------------------------------------------------------------------
# Exhaustive enumeration (test oracle).
# ---------------------------------------------------------------------------


def brute_force_routes(
    network: "Network",
    origin: str,
    destination: str,
    max_transfers: int = DEFAULT_MAX_TRANSFERS,
    max_hops: int | None = None,
    cap: int = 10**6,
) -> list[Route]:
    """Every simple feasible route between two stops, within bounds.

    Simple means no (stop, line) state is used twice. Intended for small
    fixtures only; raises EnumerationCapExceeded past `cap` routes.
    """
    if origin == destination:
        raise ValueError("origin and destination must differ")
    for stop in (origin, destination):
        if stop not in network.stops:
            raise ValueError(f"unknown stop {stop!r}")
    by_dest = enumerate_simple_routes(network, origin, max_transfers, max_hops, cap)
    return by_dest.get(destination, [])


def enumerate_simple_routes(
    network: "Network",
    origin: str,
    max_transfers: int = DEFAULT_MAX_TRANSFERS,
    max_hops: int | None = None,
    cap: int = 10**6,
) -> dict[str, list[Route]]:
    """All simple routes from one origin, grouped by final stop."""
    serving: dict[str, list[tuple[str, int]]] = {}
    for line_id in sorted(network.lines):
        for pos, stop in enumerate(network.lines[line_id].itinerary):
            serving.setdefault(stop, []).append((line_id, pos))
    if max_hops is None:
        max_hops = sum(len(l.itinerary) for l in network.lines.values())

    out: dict[str, list[Route]] = {}
    count = 0

    def extend(stop: str, legs: list[Leg], visited: set, hops: int) -> None:
        nonlocal count
        transfers = len(legs)  # transfers after boarding one more line
        if transfers > max_transfers:
            return
        for line_id, pos in serving.get(stop, ()):
            itinerary = network.lines[line_id].itinerary
            if (stop, line_id) in visited:
                continue
            ride_states = [(stop, line_id)]
            for j in range(pos + 1, len(itinerary)):
                state = (itinerary[j], line_id)
                if state in visited or state in ride_states:
                    break
                ride_states.append(state)
                leg_hops = j - pos
                if hops + leg_hops > max_hops:
                    break
                leg = Leg(line_id, stop, itinerary[j], tuple(itinerary[pos : j + 1]))
                new_legs = legs + [leg]
                new_visited = visited | set(ride_states)
                if itinerary[j] != origin:
                    count += 1
                    if count > cap:
                        raise EnumerationCapExceeded(f"more than {cap} routes enumerated")
                    out.setdefault(itinerary[j], []).append(Route(tuple(new_legs)))
                extend(itinerary[j], new_legs, new_visited, hops + leg_hops)

    extend(origin, [], set(), 0)
    return out
