import io

import pytest

from transitsurvey import (
    BusLine,
    LinkTimeTable,
    Network,
    NetworkError,
    PLANAR,
    GEODESIC,
    RideError,
    Stop,
    estimate_link_times,
    load_network,
    load_rides,
)
from transitsurvey.ingest import euclidean_km, haversine_km


def test_load_network_counts(t1_files):
    network = load_network(t1_files["stops"], t1_files["lines"], PLANAR)
    assert len(network.stops) == 6
    assert len(network.lines) == 3
    assert network.lines["L1"].itinerary == ("A", "B", "C", "D")
    assert network.stops["A"].is_terminal and not network.stops["B"].is_terminal


def test_duplicate_stop_rejected():
    stops = io.StringIO("stop_id,x_km,y_km,is_terminal\nA,0,0,0\nA,1,0,0\nB,2,0,0\n")
    lines = io.StringIO("line_id,seq,stop_id\nL1,0,A\nL1,1,B\n")
    with pytest.raises(NetworkError, match="duplicate stop_id 'A'"):
        load_network(stops, lines, PLANAR)


def test_unknown_stop_in_line_rejected():
    stops = io.StringIO("stop_id,x_km,y_km,is_terminal\nA,0,0,0\nB,1,0,0\n")
    lines = io.StringIO("line_id,seq,stop_id\nLX,0,A\nLX,1,Z\n")
    with pytest.raises(NetworkError, match="unknown stop 'Z'"):
        load_network(stops, lines, PLANAR)


def test_short_itinerary_rejected():
    with pytest.raises(NetworkError, match="shorter than 2"):
        Network.build([Stop("A", (0, 0))], [BusLine("L1", ("A",))], PLANAR)


def test_immediate_repeat_rejected_but_loop_allowed():
    stops = [Stop(s, (float(i), 0.0)) for i, s in enumerate("ABC")]
    with pytest.raises(NetworkError, match="consecutively"):
        Network.build(stops, [BusLine("L1", ("A", "A", "B"))], PLANAR)
    looped = Network.build(stops, [BusLine("L1", ("A", "B", "C", "B"))], PLANAR)
    assert looped.lines["L1"].itinerary == ("A", "B", "C", "B")


def test_network_round_trip(t1_files):
    network = load_network(t1_files["stops"], t1_files["lines"], PLANAR)
    assert Network.from_dict(network.to_dict()) == network


def test_distance_modes():
    planar = Network.build(
        [Stop("A", (0.0, 0.0)), Stop("B", (3.0, 4.0))], [BusLine("L", ("A", "B"))], PLANAR
    )
    assert planar.distance_km("A", "B") == pytest.approx(5.0)
    geo = Network.build(
        [Stop("A", (0.0, 0.0)), Stop("B", (0.0, 1.0))], [BusLine("L", ("A", "B"))], GEODESIC
    )
    # one degree of longitude at the equator is about 111.19 km
    assert geo.distance_km("A", "B") == pytest.approx(111.19, abs=0.05)
    assert haversine_km((0.0, 0.0), (0.0, 0.0)) == 0.0
    assert euclidean_km((1.0, 1.0), (1.0, 1.0)) == 0.0


def test_load_rides_accepts_valid_and_expands_legs(t1_files):
    network = load_network(t1_files["stops"], t1_files["lines"], PLANAR)
    rides, rejected = load_rides(t1_files["rides"], network)
    assert len(rides) == 6 and not rejected
    r4 = next(r for r in rides if r.rider_id == "r4")
    assert len(r4.real_route.legs) == 2
    assert r4.real_route.legs[0].stop_sequence == ("A", "B")
    assert r4.real_route.legs[1].stop_sequence == ("B", "F")


def test_load_rides_rejects_chain_break(t1):
    network, *_ = t1
    bad = io.StringIO(
        '{"rider_id":"x","origin":"A","destination":"F",'
        '"legs":[{"line":"L1","board":"A","alight":"B"},{"line":"L1","board":"C","alight":"D"}]}\n'
    )
    rides, rejected = load_rides(bad, network)
    assert not rides and len(rejected) == 1
    assert "chain" in rejected[0] or "do not chain" in rejected[0]


def test_load_rides_rejects_wrong_line_membership(t1):
    network, *_ = t1
    bad = io.StringIO(
        '{"rider_id":"x","origin":"A","destination":"C",'
        '"legs":[{"line":"L2","board":"A","alight":"C"}]}\n'
    )
    rides, rejected = load_rides(bad, network)
    assert not rides and len(rejected) == 1
    assert "does not run" in rejected[0]


def test_load_rides_strict_raises(t1):
    network, *_ = t1
    bad = io.StringIO('{"rider_id":"x","origin":"A","destination":"C","legs":[]}\n')
    with pytest.raises(RideError):
        load_rides(bad, network, strict=True)


def test_every_accepted_ride_chains(t1_files, t1):
    network, *_ = t1
    rides, _ = load_rides(t1_files["rides"], network)
    for ride in rides:
        legs = ride.real_route.legs
        assert legs[0].board == ride.origin
        assert legs[-1].alight == ride.destination
        for a, b in zip(legs, legs[1:]):
            assert a.alight == b.board
        for leg in legs:
            itinerary = network.lines[leg.line_id].itinerary
            joined = ",".join(itinerary)
            assert ",".join(leg.stop_sequence) in joined


def test_estimate_link_times_means_and_fallback(t1_files, t1):
    network, *_ = t1
    table, skipped = estimate_link_times(t1_files["gps"], network, default_speed_kmh=20.0)
    assert skipped == 1  # the unparseable row
    # v1 passes A->B at 100 s then 140 s; B->C observed once at 120 s
    assert table.times[("L1", "A", "B")] == pytest.approx(120.0)
    assert table.times[("L1", "B", "C")] == pytest.approx(120.0)
    # v2's pass is out of order and contributes nothing
    assert ("L1", "C", "D") not in table.times
    # fallback: 1 km at 20 km/h
    assert table.link_time_s("L1", "C", "D", 1.0) == pytest.approx(180.0)


def test_link_time_lookup_is_total(t1):
    network, times, graph, _ = t1
    for (u, v), arc in graph.arcs.items():
        for line_id in arc.lines:
            assert times.link_time_s(line_id, u, v, arc.length_km) > 0.0


def test_empty_gps_is_pure_fallback(t1):
    network, *_ = t1
    table, skipped = estimate_link_times(
        io.StringIO("vehicle_id,line_id,lat,lon,timestamp_s\n"), network
    )
    assert skipped == 0 and not table.times
    assert table.link_time_s("L1", "A", "B", 1.0) == pytest.approx(180.0)
