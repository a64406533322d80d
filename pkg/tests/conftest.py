import pytest

from transitsurvey import (
    BusLine,
    LinkTimeTable,
    Network,
    PLANAR,
    Stop,
    build_state_graph,
    build_transit_graph,
)


def t1_network() -> Network:
    """Six-stop planar fixture used across the suite.

    A(0,0) B(1,0) C(2,0) D(3,0) E(1.5,2) F(1,1);
    L1: A,B,C,D  L2: A,E,D  L3: B,F. All link lengths Euclidean.
    """
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
    return Network.build(stops, lines, PLANAR)


def t1_times() -> LinkTimeTable:
    return LinkTimeTable(default_speed_kmh=20.0, transfer_wait_s=300.0)


@pytest.fixture
def t1():
    network = t1_network()
    times = t1_times()
    graph = build_transit_graph(network)
    state_graph = build_state_graph(network, times)
    return network, times, graph, state_graph


# --- file fixtures for the ingest/CLI layers ---

T1_STOPS_CSV = """stop_id,x_km,y_km,is_terminal
A,0.0,0.0,true
B,1.0,0.0,false
C,2.0,0.0,false
D,3.0,0.0,true
E,1.5,2.0,false
F,1.0,1.0,false
"""

T1_LINES_CSV = """line_id,seq,stop_id
L1,0,A
L1,1,B
L1,2,C
L1,3,D
L2,0,A
L2,1,E
L2,2,D
L3,0,B
L3,1,F
"""

# Six riders; with the distance criterion at lambda=2.0 exactly r1, r3 and
# r6 are unsatisfied (they ride L2's 5.0 km instead of L1's 3.0 km), so
# stop A counts Qr=3/Qb=2 and stop B counts Qr=0/Qb=1.
T1_RIDES_JSONL = "\n".join(
    [
        '{"rider_id":"r1","origin":"A","destination":"D","legs":[{"line":"L2","board":"A","alight":"D"}]}',
        '{"rider_id":"r2","origin":"A","destination":"D","legs":[{"line":"L1","board":"A","alight":"D"}]}',
        '{"rider_id":"r3","origin":"A","destination":"D","legs":[{"line":"L2","board":"A","alight":"D"}]}',
        '{"rider_id":"r4","origin":"A","destination":"F","legs":[{"line":"L1","board":"A","alight":"B"},{"line":"L3","board":"B","alight":"F"}]}',
        '{"rider_id":"r5","origin":"B","destination":"D","legs":[{"line":"L1","board":"B","alight":"D"}]}',
        '{"rider_id":"r6","origin":"A","destination":"D","legs":[{"line":"L2","board":"A","alight":"D"}]}',
    ]
) + "\n"

T1_GPS_CSV = """vehicle_id,line_id,lat,lon,timestamp_s
v1,L1,0.0,0.0,0
v1,L1,1.0,0.0,100
v1,L1,2.0,0.0,220
v1,L1,0.0,0.0,1000
v1,L1,1.0,0.0,1140
v2,L1,0.0,0.0,2000
v2,L1,1.0,0.0,1900
junk,L1,not-a-number,0.0,5
"""


@pytest.fixture
def t1_files(tmp_path):
    paths = {
        "stops": tmp_path / "stops.csv",
        "lines": tmp_path / "lines.csv",
        "rides": tmp_path / "rides.jsonl",
        "gps": tmp_path / "gps.csv",
    }
    paths["stops"].write_text(T1_STOPS_CSV)
    paths["lines"].write_text(T1_LINES_CSV)
    paths["rides"].write_text(T1_RIDES_JSONL)
    paths["gps"].write_text(T1_GPS_CSV)
    return paths
