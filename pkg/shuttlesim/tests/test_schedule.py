"""
A module containing unit tests for the `schedule` module.

Licensed under a 3-clause BSD style license - see LICENSE.txt

"""
import dataclasses

import pytest

from shuttlesim.core import Network, Subnetwork, Request, FleetConfig, \
    Instance
from shuttlesim.exceptions import ScheduleViolation
from shuttlesim.schedule import (Action, Move, Tour, Schedule, TourBuilder,
                                 validate_tour, validate_schedule,
                                 total_length, makespan, evaluate)


@pytest.fixture
def instance():
    net = Network(nodes=[1, 2, 3, 4], depot=1,
                  edges=[(1, 2, 1), (2, 3, 1), (3, 4, 1), (4, 1, 1)])
    sub = Subnetwork.from_network(net, 0, 'circuit', [1, 2, 3, 4])
    return Instance(network=net, subnetworks=(sub,),
                    fleet=FleetConfig(k=1, cap=2),
                    requests=[Request(id=7, kind='pdp', t=0, x=2, y=3)])


def round_trip():
    b = TourBuilder(0, 1, 0)
    b.travel(2, 0, 1)
    b.act(1, ((7, 1),))
    b.travel(3, 1, 2)
    b.act(2, ((7, -1),))
    b.travel(4, 2, 3)
    b.travel(1, 3, 4)
    return b.finish()


def test_builder_round_trip(instance):
    tour = round_trip()
    assert len(tour.moves) == 3
    assert [a.delta for a in tour.actions] == [1, -1]
    assert tour.moves[-1].path == (3, 4, 1)
    assert [m.load for m in tour.moves] == [0, 1, 0]
    assert validate_tour(tour, instance) == []
    assert validate_tour(tour, instance, strict=True) == []

    schedule = Schedule.from_tours([tour])
    assert schedule.service_map == {7: ((0, 0), (0, 1))}
    assert validate_schedule(schedule, instance) == []
    assert total_length(schedule) == 4
    assert makespan(schedule) == 4
    assert evaluate(schedule, 'length') == 4


def test_builder_merges_and_waits():
    b = TourBuilder(0, 1, 0)
    b.travel(2, 0, 1)
    b.act(1, ((1, 1),))
    b.act(1, ((2, 1),))
    b.travel(3, 5, 6)
    assert b.load == 2
    assert b.station == 3
    b.act(6, ((1, -1), (2, -1)))
    b.travel(4, 6, 7)
    b.travel(1, 9, 10)
    tour = b.finish()

    assert [(a.station, a.time, a.delta) for a in tour.actions] == [
        (2, 1, 2), (3, 6, -2), (4, 7, 0)
    ]
    assert tour.moves[1].departure == 5
    assert tour.moves[-1].departure == 9
    assert sum(m.length for m in tour.moves) == 4


def test_builder_rejects_time_travel():
    b = TourBuilder(0, 1, 0)
    b.travel(2, 3, 4)
    with pytest.raises(ScheduleViolation):
        b.travel(3, 2, 3)
    with pytest.raises(ScheduleViolation):
        b.act(1, ((1, 1),))


def test_validate_tour_direction(instance):
    tour = Tour(vehicle=0,
                moves=(Move(0, 1, 0, 4, 1, (1, 4), 0, 0, 1),
                       Move(0, 4, 1, 1, 2, (4, 1), 0, 0, 1)),
                actions=(Action(0, 4, 1, 0),))
    assert validate_tour(tour, instance) == ["m1: direction (1 -> 4)"]


def test_validate_tour_violations(instance):
    tour = round_trip()
    moves = list(tour.moves)
    moves[1] = dataclasses.replace(moves[1], load=5)
    bad = validate_tour(dataclasses.replace(tour, moves=tuple(moves)),
                        instance)
    assert "m2: load 5 outside [0, Cap]" in bad
    assert any(v.startswith('a1: load(m2)') for v in bad)

    moves = list(tour.moves)
    moves[1] = dataclasses.replace(moves[1], departure=0, arrival=1)
    bad = validate_tour(dataclasses.replace(tour, moves=tuple(moves)),
                        instance)
    assert "m2: dep(m2) < t(a1)+dur(a1)" in bad

    moves = list(tour.moves)
    moves[1] = dataclasses.replace(moves[1], departure=2, arrival=3)
    late = dataclasses.replace(tour, moves=tuple(moves))
    assert "m2: dep(m2) != t(a1)+dur(a1)" in validate_tour(late, instance,
                                                          strict=True)
    assert "a2: t(a2) != arr(m2)" in validate_tour(late, instance)


def test_validate_tour_not_home(instance):
    b = TourBuilder(0, 1, 0)
    b.travel(2, 0, 1)
    tour = b.finish()
    assert validate_tour(tour, instance) == [
        "m1: tour does not end at the depot"
    ]


def test_validate_schedule_violations(instance):
    empty = Schedule.from_tours([TourBuilder(0, 1, 0).finish()])
    assert validate_schedule(empty, instance) == ["unserved request 7"]
    assert makespan(empty) == 0
    assert total_length(empty) == 0

    early = instance.replace(requests=[Request(id=7, kind='pdp', t=3, x=2,
                                               y=3)])
    bad = validate_schedule(Schedule.from_tours([round_trip()]), early)
    assert bad == ["request 7 picked up at tick 1 before its release 3",
                   "request 7 delivered before delivery request 7 is "
                   "released"]

    wrong_map = Schedule(tours=(round_trip(),), service_map={})
    assert validate_schedule(wrong_map, instance) == [
        "service map entry of request 7 does not match its actions"
    ]


def test_validate_schedule_windows(instance):
    windowed = instance.replace(requests=[
        Request(id=7, kind='full', t=0, x=2, y=3, p=2, q=3)
    ])
    bad = validate_schedule(Schedule.from_tours([round_trip()]), windowed)
    assert "request 7 picked up at tick 1 before p = 2" in bad
    assert not any("after q" in v for v in bad)


def test_evaluate_makespan_of_waiting_tour():
    b = TourBuilder(0, 1, 0)
    b.travel(2, 0, 1)
    b.travel(3, 7, 8)
    b.travel(4, 8, 9)
    b.travel(1, 9, 10)
    schedule = Schedule.from_tours([b.finish()])
    assert evaluate(schedule, 'makespan') == 10
    assert evaluate(schedule, 'length') == 4
