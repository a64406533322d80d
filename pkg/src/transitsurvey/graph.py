"""Graph views of a bus network.

Two structures are built from the same network: a directed multigraph of
stops whose arcs remember every line serving them, and a boarding-state
graph (one state per itinerary position, plus virtual source/sink nodes
per stop) that route search runs on.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .ingest import LinkTimeTable, Network

RIDE = "ride"
BOARD = "board"
ALIGHT = "alight"
TRANSFER = "transfer"


@dataclass(frozen=True)
class TransitArc:
    """Directed stop-to-stop link with the set of lines serving it."""

    lines: frozenset[str]
    length_km: float

    @property
    def weight(self) -> int:
        return len(self.lines)


@dataclass(frozen=True)
class TransitGraph:
    nodes: frozenset[str]
    arcs: dict[tuple[str, str], TransitArc]
    out_neighbors: dict[str, tuple[str, ...]]

    def to_dict(self) -> dict:
        return {
            "nodes": sorted(self.nodes),
            "arcs": [
                {
                    "from": u,
                    "to": v,
                    "lines": sorted(arc.lines),
                    "weight": arc.weight,
                    "length_km": arc.length_km,
                }
                for (u, v), arc in sorted(self.arcs.items())
            ],
        }


def build_transit_graph(network: "Network") -> TransitGraph:
    """Overlay every line's consecutive-stop links into one directed graph.

    An arc's weight is the number of distinct lines serving that link.
    """
    lines_on: dict[tuple[str, str], set[str]] = {}
    nodes: set[str] = set()
    for line_id in sorted(network.lines):
        itinerary = network.lines[line_id].itinerary
        nodes.update(itinerary)
        for u, v in zip(itinerary, itinerary[1:]):
            lines_on.setdefault((u, v), set()).add(line_id)
    arcs: dict[tuple[str, str], TransitArc] = {}
    out: dict[str, list[str]] = {n: [] for n in nodes}
    for (u, v), lids in lines_on.items():
        length = network.distance_km(u, v)
        if length <= 0.0:
            raise ValueError(f"zero-length link {u}->{v}; stops must not share a position")
        arcs[(u, v)] = TransitArc(frozenset(lids), length)
        out[u].append(v)
    return TransitGraph(
        nodes=frozenset(nodes),
        arcs=arcs,
        out_neighbors={u: tuple(sorted(vs)) for u, vs in out.items()},
    )


@dataclass(frozen=True)
class StateArc:
    dst: int
    kind: str
    length_km: float
    time_s: float


@dataclass(frozen=True)
class StateGraph:
    """Search graph over (line, itinerary position) states.

    Riding moves along one line; boarding enters a line from a stop's
    virtual source; alighting exits to the stop's virtual sink; a sink to
    source arc at the same stop models the transfer (and carries the
    constant transfer wait).
    """

    n_line_states: int
    n_states: int
    state_line: tuple[str, ...]
    state_pos: tuple[int, ...]
    state_stop: tuple[str, ...]
    source_of: dict[str, int]
    sink_of: dict[str, int]
    sink_stop: dict[int, str]
    out_arcs: tuple[tuple[StateArc, ...], ...]
    itineraries: dict[str, tuple[str, ...]]
    transfer_wait_s: float

    @property
    def ride_arc_count(self) -> int:
        return sum(
            1 for arcs in self.out_arcs for a in arcs if a.kind == RIDE
        )


def build_state_graph(network: "Network", times: "LinkTimeTable") -> StateGraph:
    """Expand a network into boarding states with ride/board/alight arcs."""
    state_line: list[str] = []
    state_pos: list[int] = []
    state_stop: list[str] = []
    line_state_ids: dict[tuple[str, int], int] = {}
    for line_id in sorted(network.lines):
        for pos, stop in enumerate(network.lines[line_id].itinerary):
            line_state_ids[(line_id, pos)] = len(state_line)
            state_line.append(line_id)
            state_pos.append(pos)
            state_stop.append(stop)
    n_line_states = len(state_line)

    source_of: dict[str, int] = {}
    sink_of: dict[str, int] = {}
    next_id = n_line_states
    for stop_id in sorted(network.stops):
        source_of[stop_id] = next_id
        sink_of[stop_id] = next_id + 1
        next_id += 2
    sink_stop = {v: k for k, v in sink_of.items()}

    out: list[list[StateArc]] = [[] for _ in range(next_id)]
    for line_id in sorted(network.lines):
        itinerary = network.lines[line_id].itinerary
        for pos, stop in enumerate(itinerary):
            sid = line_state_ids[(line_id, pos)]
            out[source_of[stop]].append(StateArc(sid, BOARD, 0.0, 0.0))
            out[sid].append(StateArc(sink_of[stop], ALIGHT, 0.0, 0.0))
            if pos + 1 < len(itinerary):
                nxt = itinerary[pos + 1]
                length = network.distance_km(stop, nxt)
                time_s = times.link_time_s(line_id, stop, nxt, length)
                out[sid].append(StateArc(line_state_ids[(line_id, pos + 1)], RIDE, length, time_s))
    for stop_id in network.stops:
        out[sink_of[stop_id]].append(
            StateArc(source_of[stop_id], TRANSFER, 0.0, times.transfer_wait_s)
        )

    return StateGraph(
        n_line_states=n_line_states,
        n_states=next_id,
        state_line=tuple(state_line),
        state_pos=tuple(state_pos),
        state_stop=tuple(state_stop),
        source_of=source_of,
        sink_of=sink_of,
        sink_stop=sink_stop,
        out_arcs=tuple(tuple(a) for a in out),
        itineraries={lid: network.lines[lid].itinerary for lid in network.lines},
        transfer_wait_s=times.transfer_wait_s,
    )
