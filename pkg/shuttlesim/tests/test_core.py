"""
A module containing unit tests for the `core` module.

Licensed under a 3-clause BSD style license - see LICENSE.txt

"""
import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shuttlesim.core import (Network, Subnetwork, Request, FleetConfig,
                             Instance, Objective, Scenario, RequestKind,
                             TaskKind, SubnetworkKind, build_metric,
                             circuit_distance, make_task, validate_partition)
from shuttlesim.exceptions import (GraphNotConnected, NotOnSubnetwork,
                                   NoCoveringSubnetwork, InfeasibleWindow,
                                   LabelError, InstanceError, BadParams)


def square(labels=()):
    net = Network(nodes=[1, 2, 3, 4], depot=1, labels=labels,
                  edges=[(1, 2, 1), (2, 3, 1), (3, 4, 1), (4, 1, 1)])
    return net, Subnetwork.from_network(net, 0, 'circuit', [1, 2, 3, 4])


def square_instance(requests, cap=2, **kwargs):
    net, sub = square()
    return Instance(network=net, subnetworks=(sub,),
                    fleet=FleetConfig(k=1, cap=cap), requests=requests,
                    **kwargs)


@st.composite
def connected_networks(draw):
    n = draw(st.integers(2, 7))
    edges = {}
    for v in range(1, n):
        u = draw(st.integers(0, v - 1))
        edges[frozenset((u, v))] = draw(st.integers(1, 9))
    extra = draw(st.lists(st.tuples(st.integers(0, n - 1),
                                     st.integers(0, n - 1),
                                     st.integers(1, 9)), max_size=6))
    for u, v, w in extra:
        if u != v:
            edges.setdefault(frozenset((u, v)), w)
    return Network(nodes=range(n), depot=0,
                   edges=[tuple(sorted(e)) + (w,) for e, w in edges.items()])


def test_enum_parse():
    assert Objective.parse('length') is Objective.TOTAL_TOUR_LENGTH
    assert Objective.parse('MAKESPAN') is Objective.MAKESPAN
    assert Objective.parse('total_tour_length') is Objective.TOTAL_TOUR_LENGTH
    assert RequestKind.parse('PDP') is RequestKind.PDP
    assert TaskKind.parse('full-task') is TaskKind.FULL_TASK
    assert str(Scenario.MORNING) == 'morning'
    with pytest.raises(BadParams):
        Scenario.parse('night')


@pytest.mark.parametrize('edges, depot', [
    ([(1, 1, 1)], 1),
    ([(1, 2, 0)], 1),
    ([(1, 2, 1), (2, 1, 3)], 1),
    ([(1, 5, 1)], 1),
    ([(1, 2, 1)], 9),
])
def test_network_invalid(edges, depot):
    with pytest.raises(InstanceError):
        Network(nodes=[1, 2], edges=edges, depot=depot)


def test_network_lookup():
    net, _ = square(labels=[(1, 'parking')])
    assert net.edge_length(2, 1) == 1
    assert net.has_edge(4, 1)
    assert not net.has_edge(1, 3)
    assert net.label(1) == 'parking'
    assert net.label(2) is None
    with pytest.raises(InstanceError):
        net.edge_length(1, 3)


def test_metric_closure():
    net = Network(nodes=[1, 2, 3, 4], depot=1,
                  edges=[(1, 2, 2), (2, 3, 2), (1, 3, 7), (3, 4, 1)])
    metric = build_metric(net)
    assert metric.d(1, 3) == 4
    assert metric(4, 1) == 5
    assert metric.dist.dtype == np.int64
    with pytest.raises(ValueError):
        metric.dist[0, 0] = 3
    with pytest.raises(InstanceError):
        metric.d(1, 9)


def test_metric_disconnected():
    net = Network(nodes=[1, 2, 3, 4], depot=1, edges=[(1, 2, 1), (3, 4, 1)])
    with pytest.raises(GraphNotConnected):
        build_metric(net)


@settings(deadline=None, max_examples=50)
@given(connected_networks())
def test_metric_is_a_metric(net):
    metric = build_metric(net)
    for u, v in itertools.product(net.nodes, repeat=2):
        assert metric.d(u, v) == metric.d(v, u)
        assert (metric.d(u, v) == 0) == (u == v)
    for u, v, w in itertools.product(net.nodes, repeat=3):
        assert metric.d(u, w) <= metric.d(u, v) + metric.d(v, w)
    for u, v, length in net.edges:
        assert metric.d(u, v) <= length


@settings(deadline=None, max_examples=50)
@given(st.lists(st.integers(1, 9), min_size=2, max_size=8))
def test_circuit_round_trip(lengths):
    stations = tuple(range(len(lengths)))
    c = Subnetwork(id=0, kind='circuit', stations=stations,
                   edge_lengths=tuple(lengths))
    for u, v in itertools.product(stations, repeat=2):
        there = circuit_distance(c, u, v)
        if u == v:
            assert there == 0
        else:
            assert there + circuit_distance(c, v, u) == sum(lengths)
            assert there == sum(c.step_length(a, b) for a, b in
                                zip(c.path(u, v)[:-1], c.path(u, v)[1:]))


def test_circuit_moves():
    _, c = square()
    assert c.is_circuit
    assert c.length == 4
    assert c.successor(4) == 1
    assert c.path(3, 2) == [3, 4, 1, 2]
    assert c.step_length(1, 2) == 1
    assert c.step_length(2, 1) is None
    assert c.step_length(1, 3) is None
    with pytest.raises(NotOnSubnetwork):
        c.index(7)


def test_line_moves():
    net = Network(nodes=[0, 1, 2, 3], depot=0,
                  edges=[(0, 1, 2), (1, 2, 1), (2, 3, 3)])
    line = Subnetwork.from_network(net, 5, SubnetworkKind.LINE, [0, 1, 2, 3])
    assert not line.is_circuit
    assert line.travel(3, 1) == line.travel(1, 3) == 4
    assert line.offset(3) == 6
    assert line.step_length(2, 1) == 1
    assert line.path(3, 0) == [3, 2, 1, 0]
    with pytest.raises(InstanceError):
        circuit_distance(line, 0, 3)

    reverse = Subnetwork.from_network(net, 6, 'line', [0, 1, 2, 3], origin=3)
    assert reverse.origin == 3
    assert reverse.offset(0) == 6


def test_subnetwork_invalid():
    net, _ = square()
    with pytest.raises(InstanceError):
        Subnetwork.from_network(net, 0, 'circuit', [1, 2, 3])
    with pytest.raises(InstanceError):
        Subnetwork(id=0, kind='line', stations=(1, 2, 3), origin_index=1,
                   edge_lengths=(1, 1))
    with pytest.raises(InstanceError):
        Subnetwork(id=0, kind='circuit', stations=(1, 2), edge_lengths=(1,))
    with pytest.raises(NotOnSubnetwork):
        Subnetwork.from_network(net, 0, 'line', [1, 2, 3], origin=4)


@pytest.mark.parametrize('fields', [
    dict(kind='pickup', t=0, x=1, y=2),
    dict(kind='delivery', t=0, x=1, y=2),
    dict(kind='pdp', t=0, x=1, y=1),
    dict(kind='pdp', t=-1, x=1, y=2),
    dict(kind='pdp', t=0, x=1, y=2, z=0),
    dict(kind='pdp', t=0, x=1, y=2, p=3, q=5),
    dict(kind='full', t=0, x=1, y=2),
    dict(kind='full', t=0, x=1, y=2, p=4, q=3),
    dict(kind='pickup', t=0, x=1, z=2),
])
def test_request_invalid(fields):
    with pytest.raises(InstanceError):
        Request(id=1, **fields)


def test_make_task():
    net, c = square()
    metric = build_metric(net)
    task = make_task(Request(id=3, kind='full', t=2, x=1, y=3, p=5, q=9),
                     [c], metric)
    assert task.kind is TaskKind.FULL_TASK
    assert (task.pick, task.drop) == (5, 7)
    assert task.subnetwork == 0

    task = make_task(Request(id=4, kind='pickup', t=2, x=2, link=5), [c])
    assert task.kind is TaskKind.PICKUP_TASK
    assert task.y is None

    with pytest.raises(InfeasibleWindow):
        make_task(Request(id=3, kind='full', t=4, x=1, y=3, p=0, q=5), [c],
                  metric)
    with pytest.raises(NoCoveringSubnetwork):
        make_task(Request(id=3, kind='pdp', t=0, x=1, y=8), [c])


def test_instance_sorted_and_defaults():
    inst = square_instance([Request(id=2, kind='pdp', t=3, x=1, y=2),
                            Request(id=1, kind='pdp', t=3, x=2, y=3),
                            Request(id=5, kind='pdp', t=0, x=3, y=4)])
    assert [r.id for r in inst.requests] == [5, 1, 2]
    assert inst.fleet.assignment == (0,)
    assert inst.scenario is Scenario.OTHER
    assert inst.objective is Objective.TOTAL_TOUR_LENGTH
    assert [t.id for t in inst.tasks()] == [5, 1, 2]
    other = inst.replace(objective='makespan')
    assert other.objective is Objective.MAKESPAN
    assert other.requests == inst.requests


def test_instance_rides_fold_deliveries():
    inst = square_instance([
        Request(id=1, kind='pickup', t=0, x=2, link=2),
        Request(id=2, kind='delivery', t=4, y=4, link=1),
        Request(id=3, kind='full', t=1, x=1, y=3, p=2, q=8),
    ])
    rides = inst.ride_map
    assert sorted(rides) == [1, 3]
    assert (rides[1].origin, rides[1].destination) == (2, 4)
    assert rides[1].reveal == 4
    assert rides[1].delivery_id == 2
    assert rides[3].ready == 2
    assert rides[3].latest_pick == 6


@pytest.mark.parametrize('requests', [
    [Request(id=1, kind='pdp', t=0, x=1, y=2),
     Request(id=1, kind='pdp', t=1, x=2, y=3)],
    [Request(id=1, kind='pdp', t=0, x=1, y=9)],
    [Request(id=1, kind='pdp', t=0, x=1, y=2, z=3)],
    [Request(id=1, kind='pickup', t=0, x=1, link=7)],
    [Request(id=1, kind='pickup', t=0, x=1, link=2),
     Request(id=2, kind='delivery', t=0, y=1, link=1)],
])
def test_instance_invalid(requests):
    with pytest.raises(InstanceError):
        square_instance(requests)


def test_instance_window_too_short():
    with pytest.raises(InfeasibleWindow):
        square_instance([Request(id=1, kind='full', t=0, x=1, y=3, p=0,
                                 q=1)])


def test_instance_depot_off_subnetwork():
    net = Network(nodes=[1, 2, 3], depot=1,
                  edges=[(1, 2, 1), (2, 3, 1), (3, 1, 1)])
    line = Subnetwork.from_network(net, 0, 'line', [2, 3])
    with pytest.raises(InstanceError):
        Instance(network=net, subnetworks=(line,), fleet=FleetConfig())


def test_instance_uncovered_request():
    net = Network(nodes=[1, 2, 3], depot=1,
                  edges=[(1, 2, 1), (1, 3, 1)])
    a = Subnetwork.from_network(net, 0, 'line', [1, 2])
    b = Subnetwork.from_network(net, 1, 'line', [1, 3])
    with pytest.raises(NoCoveringSubnetwork):
        Instance(network=net, subnetworks=(a, b), fleet=FleetConfig(k=2),
                 requests=[Request(id=1, kind='pdp', t=0, x=2, y=3)])


def test_partition_morning():
    labels = [(1, 'parking'), (2, 'building'), (3, 'building'),
              (4, 'building')]
    net, c = square(labels)
    assert validate_partition(net, [c], 'morning') == []

    net, c = square(labels[:3] + [(4, 'parking')])
    assert validate_partition(net, [c], Scenario.EVENING) == [
        "subnetwork 0 contains 2 parkings instead of one"
    ]


def test_partition_nearest_parking():
    net = Network(nodes=[1, 2, 3, 4, 5, 6], depot=1,
                  labels=[(1, 'parking'), (4, 'parking'), (2, 'building'),
                          (3, 'building'), (5, 'building'), (6, 'building')],
                  edges=[(1, 2, 1), (2, 3, 1), (3, 1, 1), (4, 5, 1),
                         (5, 6, 1), (6, 4, 1), (3, 6, 1)])
    a = Subnetwork.from_network(net, 0, 'circuit', [1, 2, 3])
    b = Subnetwork.from_network(net, 1, 'circuit', [4, 5, 6])
    assert validate_partition(net, [a, b], 'morning') == []

    c = Subnetwork.from_network(net, 2, 'circuit', [1, 2, 3])
    d = Subnetwork.from_network(net, 3, 'circuit', [4, 6, 5])
    e = Subnetwork(id=4, kind='line', stations=(4, 6, 3), edge_lengths=(1, 1))
    violations = validate_partition(net, [c, d, e], 'morning')
    assert violations == ["building 3 in subnetwork 4 is nearer to a parking "
                          "of another subnetwork than to 4"]


def test_partition_lunch():
    net = Network(nodes=[1, 2, 3], depot=1,
                  labels=[(1, 'building'), (2, 'restaurant'),
                          (3, 'building')],
                  edges=[(1, 2, 1), (2, 3, 1), (3, 1, 1)])
    line = Subnetwork.from_network(net, 0, 'line', [1, 2, 3])
    assert validate_partition(net, [line], 'lunch') == []
    short = Subnetwork.from_network(net, 1, 'line', [1, 3])
    assert validate_partition(net, [line, short], 'lunch') == [
        "line 1 misses restaurant 2"
    ]


def test_partition_emergency_and_other():
    net, c = square()
    assert validate_partition(net, [c], 'emergency') == []
    line = Subnetwork.from_network(net, 1, 'line', [1, 2, 3])
    assert validate_partition(net, [line], 'emergency') == [
        "subnetwork 1 is not a circuit", "circuit 1 misses stations [4]"
    ]

    a = Subnetwork.from_network(net, 0, 'line', [1, 2])
    b = Subnetwork.from_network(net, 1, 'line', [3, 4])
    assert validate_partition(net, [a, b], 'other') == [
        "subnetworks 0 and 1 do not intersect"
    ]


def test_partition_unknown_label():
    net, c = square([(2, 'office')])
    with pytest.raises(LabelError):
        validate_partition(net, [c], 'morning')
