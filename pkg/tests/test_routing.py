import pytest

from transitsurvey import (
    BusLine,
    LinkTimeTable,
    Network,
    Objective,
    OptimalRouteIndex,
    PLANAR,
    Route,
    Leg,
    Stop,
    brute_force_routes,
    build_state_graph,
    build_transit_graph,
    optimal_route,
    route_metrics,
)
from transitsurvey.routing import EnumerationCapExceeded, enumerate_simple_routes

from _oracles import random_small_city


def legs_of(route):
    return [(l.line_id, l.board, l.alight) for l in route.legs]


# --- fixture examples, frozen from hand enumeration -------------------------


def test_distance_optimal_a_d(t1):
    network, times, graph, sg = t1
    route = optimal_route(graph, sg, "A", "D", Objective.DISTANCE)
    assert legs_of(route) == [("L1", "A", "D")]
    assert route_metrics(route, network, times).distance_km == pytest.approx(3.0)


def test_hops_optimal_a_d(t1):
    network, times, graph, sg = t1
    route = optimal_route(graph, sg, "A", "D", Objective.HOPS)
    assert legs_of(route) == [("L2", "A", "D")]
    assert route_metrics(route, network, times).hops == 2


def test_transfers_tie_resolved_by_cascade(t1):
    # both direct lines have zero transfers; the cascade prefers L1
    network, times, graph, sg = t1
    route = optimal_route(graph, sg, "A", "D", Objective.TRANSFERS)
    assert legs_of(route) == [("L1", "A", "D")]


def test_forced_transfer_a_f(t1):
    network, times, graph, sg = t1
    route = optimal_route(graph, sg, "A", "F", Objective.TRANSFERS)
    assert legs_of(route) == [("L1", "A", "B"), ("L3", "B", "F")]
    assert route_metrics(route, network, times).transfers == 1
    assert brute_force_routes(network, "A", "F", max_transfers=0) == []


def test_unreachable(t1):
    _, _, graph, sg = t1
    for objective in Objective:
        assert optimal_route(graph, sg, "F", "E", objective) is None


def test_od_validation(t1):
    network, _, graph, sg = t1
    with pytest.raises(ValueError, match="must differ"):
        optimal_route(graph, sg, "A", "A", Objective.DISTANCE)
    with pytest.raises(ValueError, match="unknown stop"):
        optimal_route(graph, sg, "A", "Z", Objective.DISTANCE)
    with pytest.raises(ValueError, match="must differ"):
        brute_force_routes(network, "A", "A")


def test_route_metrics_t1_direct(t1):
    network, times, *_ = t1
    route = Route((Leg("L1", "A", "D", ("A", "B", "C", "D")),))
    m = route_metrics(route, network, times)
    assert m.distance_km == pytest.approx(3.0)
    assert m.time_s == pytest.approx(540.0)  # 3 km at 20 km/h
    assert (m.transfers, m.hops) == (0, 3)


def test_route_metrics_with_transfer_wait(t1):
    network, times, *_ = t1
    route = Route((Leg("L1", "A", "B", ("A", "B")), Leg("L3", "B", "F", ("B", "F"))))
    m = route_metrics(route, network, times)
    assert m.distance_km == pytest.approx(2.0)
    assert m.time_s == pytest.approx(660.0)  # 360 s riding + 300 s wait
    assert (m.transfers, m.hops) == (1, 2)


def test_route_metrics_twenty_km_single_link():
    net = Network.build(
        [Stop("o", (0.0, 0.0)), Stop("d", (20.0, 0.0))], [BusLine("L", ("o", "d"))], PLANAR
    )
    m = route_metrics(Route((Leg("L", "o", "d", ("o", "d")),)), net, LinkTimeTable())
    assert m.distance_km == pytest.approx(20.0)


def test_route_metrics_rejects_non_contiguous_leg(t1):
    network, times, *_ = t1
    bad = Route((Leg("L1", "A", "C", ("A", "C")),))
    with pytest.raises(ValueError, match="not a contiguous section"):
        route_metrics(bad, network, times)


def test_brute_force_t1_a_d(t1):
    network, *_ = t1
    routes = brute_force_routes(network, "A", "D", max_transfers=2)
    assert sorted(map(legs_of, routes)) == [
        [("L1", "A", "D")],
        [("L2", "A", "D")],
    ]


def test_brute_force_enumerates_transfer_route(t1):
    network, *_ = t1
    routes = brute_force_routes(network, "A", "F", max_transfers=1)
    assert [legs_of(r) for r in routes] == [[("L1", "A", "B"), ("L3", "B", "F")]]


def test_brute_force_cap():
    net, _ = random_small_city(3)
    origin = sorted(net.stops)[0]
    with pytest.raises(EnumerationCapExceeded):
        enumerate_simple_routes(net, origin, max_transfers=3, cap=1)


def test_leg_invariants():
    with pytest.raises(ValueError, match="at least one link"):
        Leg("L", "A", "A", ("A",))
    with pytest.raises(ValueError, match="do not match"):
        Leg("L", "A", "B", ("A", "C"))
    with pytest.raises(ValueError, match="do not chain"):
        Route((Leg("L", "A", "B", ("A", "B")), Leg("M", "C", "D", ("C", "D"))))


# --- oracle-based properties ------------------------------------------------


def _oracle_check(seed: int) -> int:
    """Compare search values with exhaustive enumeration on one network."""
    network, times = random_small_city(seed)
    graph = build_transit_graph(network)
    sg = build_state_graph(network, times)
    index = OptimalRouteIndex(graph, sg, max_transfers=3)
    checked = 0
    for origin in sorted(graph.nodes):
        by_dest = enumerate_simple_routes(network, origin, max_transfers=3)
        for dest in sorted(graph.nodes):
            if dest == origin:
                continue
            routes = by_dest.get(dest, [])
            got = index.metrics(origin, dest, Objective.DISTANCE)
            assert bool(routes) == (got is not None)
            if not routes:
                continue
            metrics = [route_metrics(r, network, times) for r in routes]
            for objective in Objective:
                best = min(m.value(objective) for m in metrics)
                found = index.metrics(origin, dest, objective).value(objective)
                if objective in (Objective.TRANSFERS, Objective.HOPS):
                    assert found == best
                else:
                    assert found == pytest.approx(best, rel=1e-9)
            checked += 1
    return checked


@pytest.mark.parametrize("seed", range(8))
def test_optimal_matches_brute_force(seed):
    assert _oracle_check(seed) > 0


def test_adding_a_line_never_hurts(t1):
    network, times, graph, sg = t1
    index = OptimalRouteIndex(graph, sg)
    base = {
        (o, d, k): index.metrics(o, d, k)
        for o in sorted(graph.nodes)
        for d in sorted(graph.nodes)
        if o != d
        for k in Objective
    }
    extended = Network.build(
        list(network.stops.values()),
        list(network.lines.values()) + [BusLine("L4", ("F", "E", "D"))],
        PLANAR,
    )
    g2 = build_transit_graph(extended)
    sg2 = build_state_graph(extended, times)
    index2 = OptimalRouteIndex(g2, sg2)
    for (o, d, k), before in base.items():
        after = index2.metrics(o, d, k)
        if before is None:
            continue
        assert after is not None
        assert after.value(k) <= before.value(k) + 1e-9


def test_determinism(t1):
    _, _, graph, sg = t1
    for objective in Objective:
        runs = [optimal_route(graph, sg, "A", "D", objective) for _ in range(3)]
        assert runs[0] == runs[1] == runs[2]


def test_index_route_agrees_with_single_pair(t1):
    network, times, graph, sg = t1
    index = OptimalRouteIndex(graph, sg)
    for origin in sorted(graph.nodes):
        for dest in sorted(graph.nodes):
            if origin == dest:
                continue
            for objective in Objective:
                direct = optimal_route(graph, sg, origin, dest, objective)
                via_index = index.route(origin, dest, objective)
                assert direct == via_index
                if direct is not None:
                    m = route_metrics(direct, network, times)
                    got = index.metrics(origin, dest, objective)
                    assert got.value(objective) == pytest.approx(m.value(objective))


def test_transfer_cap_limits_routes():
    # A chain of single-link lines needs a transfer per link.
    stops = [Stop(s, (float(i), 0.0)) for i, s in enumerate("ABCDEF")]
    lines = [
        BusLine(f"L{i}", (a, b)) for i, (a, b) in enumerate(zip("ABCDE", "BCDEF"))
    ]
    net = Network.build(stops, lines, PLANAR)
    graph = build_transit_graph(net)
    sg = build_state_graph(net, LinkTimeTable())
    assert optimal_route(graph, sg, "A", "F", Objective.DISTANCE, max_transfers=3) is None
    found = optimal_route(graph, sg, "A", "F", Objective.DISTANCE, max_transfers=4)
    assert found is not None and len(found.legs) == 5
