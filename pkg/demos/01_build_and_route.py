"""Build a small bus network and query the four optimal routes.

Six stops, three lines. The direct L1 and L2 both connect A to D, but
they win under different objectives: L1 is shorter and faster, L2 stops
less often.
"""
from transitsurvey import (
    BusLine,
    LinkTimeTable,
    Network,
    Objective,
    PLANAR,
    Stop,
    build_state_graph,
    build_transit_graph,
    optimal_route,
    route_metrics,
)

# a toy planar city; coordinates are kilometres
stops = [
    Stop("A", (0.0, 0.0), is_terminal=True),
    Stop("B", (1.0, 0.0)),
    Stop("C", (2.0, 0.0)),
    Stop("D", (3.0, 0.0), is_terminal=True),
    Stop("E", (1.5, 2.0)),
    Stop("F", (1.0, 1.0)),
]
lines = [
    BusLine("L1", ("A", "B", "C", "D")),
    BusLine("L2", ("A", "E", "D")),
    BusLine("L3", ("B", "F")),
]
network = Network.build(stops, lines, PLANAR)

# buses average 20 km/h and a transfer costs five minutes of waiting
times = LinkTimeTable(default_speed_kmh=20.0, transfer_wait_s=300.0)
graph = build_transit_graph(network)
states = build_state_graph(network, times)

print(f"{'objective':<10} {'legs':<30} {'km':>6} {'sec':>6} {'xfer':>4} {'hops':>4}")
for objective in Objective:
    route = optimal_route(graph, states, "A", "D", objective)
    m = route_metrics(route, network, times)
    legs = " + ".join(f"{l.line_id}:{l.board}->{l.alight}" for l in route.legs)
    print(f"{objective.value:<10} {legs:<30} {m.distance_km:>6.1f} {m.time_s:>6.0f}"
          f" {m.transfers:>4} {m.hops:>4}")

# reaching F forces a transfer at B
route = optimal_route(graph, states, "A", "F", Objective.TRANSFERS)
print("\nA -> F needs", route_metrics(route, network, times).transfers, "transfer:",
      " + ".join(f"{l.line_id}:{l.board}->{l.alight}" for l in route.legs))

# and nothing leaves F at all
print("F -> E is", optimal_route(graph, states, "F", "E", Objective.DISTANCE))
