"""
Actions, moves, tours and schedules: the dynamic side of a solution. This
module also checks schedules for feasibility and evaluates the two
objective functions (total tour length and makespan).

:License: :doc:`../LICENSE`

"""
import logging
from collections import defaultdict
from dataclasses import dataclass, field

from .core import Objective
from .exceptions import ScheduleViolation


__all__ = ['Action', 'Move', 'Tour', 'Schedule', 'TourBuilder',
           'validate_tour', 'validate_schedule', 'total_length', 'makespan',
           'evaluate', 'ACTION_DURATION']

ACTION_DURATION = 0

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Action:
    """
    Passengers entering (``delta > 0``) or leaving (``delta < 0``) vehicle
    ``vehicle`` at ``station`` and tick ``time``. ``served`` lists the
    ``(request id, signed count)`` pairs that make up ``delta``. An action
    with ``delta == 0`` is a plain stop.

    """
    vehicle: int
    station: int
    time: int
    delta: int
    duration: int = ACTION_DURATION
    served: tuple = ()


@dataclass(frozen=True)
class Move:
    """
    A vehicle driving ``path`` on subnetwork ``subnetwork`` without
    stopping; ``length`` is the distance driven and ``load`` the number of
    passengers aboard. A move with a single-station path and
    ``departure == arrival`` connects two actions at the same station.

    """
    vehicle: int
    origin: int
    departure: int
    destination: int
    arrival: int
    path: tuple
    load: int
    subnetwork: int
    length: int = 0


@dataclass(frozen=True)
class Tour:
    """ Alternating moves and actions of one vehicle, depot to depot. """
    vehicle: int
    moves: tuple
    actions: tuple


@dataclass(frozen=True)
class Schedule:
    """
    One tour per vehicle plus the service map ``{request id: ((vehicle,
    pickup action index), (vehicle, delivery action index))}``.

    Requests are keyed by the id of the request that releases the ride; a
    delivery request linked to a pickup request is served through the
    entry of its pickup request.

    """
    tours: tuple
    service_map: dict = field(default_factory=dict)

    @classmethod
    def from_tours(cls, tours):
        """ Assemble a schedule and derive its service map from the
        ``served`` entries of the tours' actions. """
        picks = {}
        drops = {}
        for tour in tours:
            for i, action in enumerate(tour.actions):
                for rid, count in action.served:
                    target = picks if count > 0 else drops
                    target.setdefault(rid, (tour.vehicle, i))
        service_map = {rid: (picks.get(rid), drops.get(rid))
                       for rid in sorted(set(picks) | set(drops))}
        return cls(tours=tuple(tours), service_map=service_map)


class TourBuilder:
    """
    Incrementally assemble the tour of one vehicle from the stations it
    drives through and the passengers it exchanges.

    Consecutive edges driven without a stop form one move. A stop without
    passenger exchange (waiting on the way) becomes an action with
    ``delta == 0``; consecutive exchanges of the same sign at one station
    and tick are merged into a single action.

    Parameters
    ----------
    vehicle : int
        Vehicle index.

    depot : int
        Start and end station of the tour.

    subnetwork : int
        Id of the subnetwork the vehicle operates on.

    """
    def __init__(self, vehicle, depot, subnetwork):
        self.vehicle = vehicle
        self.depot = depot
        self.subnetwork = subnetwork
        self._moves = []
        self._actions = []
        self._path = [depot]
        self._departure = None
        self._length = 0
        self._tick = 0
        self._load = 0

    @property
    def station(self):
        return self._path[-1]

    @property
    def load(self):
        return self._load

    @property
    def tick(self):
        return self._tick

    def _close(self, arrival):
        departure = arrival if self._departure is None else self._departure
        self._moves.append(Move(
            vehicle=self.vehicle, origin=self._path[0], departure=departure,
            destination=self._path[-1], arrival=arrival,
            path=tuple(self._path), load=self._load,
            subnetwork=self.subnetwork, length=self._length
        ))
        self._path = [self._path[-1]]
        self._departure = None
        self._length = 0

    def travel(self, station, departure, arrival):
        """ Drive one edge from the current station to ``station``. """
        if departure < self._tick or arrival < departure:
            raise ScheduleViolation([
                "vehicle {}: departure at tick {} precedes tick {}"
                .format(self.vehicle, departure, self._tick)
            ])
        if len(self._path) > 1 and departure > self._tick:
            self._stop(self._tick, ())
        if len(self._path) == 1:
            self._departure = departure
        self._path.append(station)
        self._length += arrival - departure
        self._tick = arrival

    def act(self, time, served):
        """ Exchange passengers at the current station at tick ``time``;
        ``served`` holds ``(request id, signed count)`` pairs of one
        sign. """
        served = tuple(served)
        if time < self._tick:
            raise ScheduleViolation([
                "vehicle {}: action at tick {} precedes tick {}"
                .format(self.vehicle, time, self._tick)
            ])
        delta = sum(count for _, count in served)
        last = self._actions[-1] if self._actions else None
        if (len(self._path) == 1 and last is not None and
                last.time == time and last.delta * delta > 0):
            self._actions[-1] = Action(
                vehicle=self.vehicle, station=last.station, time=time,
                delta=last.delta + delta, served=last.served + served
            )
            self._load += delta
            return
        if len(self._path) > 1 and time > self._tick:
            self._stop(self._tick, ())
        self._stop(time, served)

    def _stop(self, time, served):
        self._close(time)
        delta = sum(count for _, count in served)
        self._actions.append(Action(vehicle=self.vehicle,
                                    station=self.station, time=time,
                                    delta=delta, served=served))
        self._load += delta
        self._tick = time + ACTION_DURATION

    def finish(self):
        """ Close the final move and return the tour. """
        self._close(self._tick)
        return Tour(vehicle=self.vehicle, moves=tuple(self._moves),
                    actions=tuple(self._actions))


def _check_move(i, move, sub, cap):
    bad = []
    name = "m{:d}".format(i)
    if not 0 <= move.load <= cap:
        bad.append("{:s}: load {:d} outside [0, Cap]".format(name, move.load))
    if not move.path or move.path[0] != move.origin or \
            move.path[-1] != move.destination:
        bad.append("{:s}: path does not run from orig({:s}) to dest({:s})"
                   .format(name, name, name))
        return bad
    if sub is None:
        return bad
    if move.subnetwork != sub.id:
        bad.append("{:s}: subnetwork {} is not the vehicle's subnetwork {}"
                   .format(name, move.subnetwork, sub.id))
    length = 0
    for u, v in zip(move.path[:-1], move.path[1:]):
        step = sub.step_length(u, v)
        if step is None:
            if sub.step_length(v, u) is not None:
                bad.append("{:s}: direction ({} -> {})".format(name, u, v))
                step = sub.step_length(v, u)
            else:
                bad.append("{:s}: ({}, {}) is not an edge of subnetwork {}"
                           .format(name, u, v, sub.id))
                continue
        length += step
    if move.length != length:
        bad.append("{:s}: length {:d} differs from path length {:d}"
                   .format(name, move.length, length))
    if move.arrival != move.departure + length:
        bad.append("{:s}: arr({:s}) != dep({:s}) + length"
                   .format(name, name, name))
    return bad


def validate_tour(tour, instance, strict=False):
    """
    Check a tour against the tour and move rules.

    Parameters
    ----------
    tour : Tour
        The tour to check.

    instance : Instance
        Provides the depot, vehicle capacity and the vehicle's subnetwork.

    strict : bool, optional
        When `True`, every move must depart exactly when the preceding
        action completes. By default a later departure is accepted and the
        gap is waiting time.

    Returns
    -------
    violations : list of str
        Empty when the tour is feasible. Each entry names the offending
        move ``m<i>`` or action ``a<i>`` (1-based) and the broken rule.

    """
    bad = []
    moves, actions = tour.moves, tour.actions
    if not moves:
        return ["tour of vehicle {} has no moves".format(tour.vehicle)]
    if len(moves) != len(actions) + 1:
        bad.append("tour must alternate moves and actions, got {:d} moves "
                   "and {:d} actions".format(len(moves), len(actions)))

    sub = None
    if 0 <= tour.vehicle < instance.fleet.k:
        sub = instance.vehicle_subnetwork(tour.vehicle)
    else:
        bad.append("unknown vehicle {}".format(tour.vehicle))
    cap = instance.cap
    depot = instance.depot

    for i, item in enumerate(moves + actions):
        if item.vehicle != tour.vehicle:
            kind = 'm' if i < len(moves) else 'a'
            idx = i + 1 if i < len(moves) else i - len(moves) + 1
            bad.append("{:s}{:d}: vehicle {} differs from tour vehicle {}"
                       .format(kind, idx, item.vehicle, tour.vehicle))

    if moves[0].origin != depot:
        bad.append("m1: tour does not start at the depot")
    if moves[-1].destination != depot:
        bad.append("m{:d}: tour does not end at the depot".format(len(moves)))
    if moves[0].load != 0:
        bad.append("m1: vehicle leaves the depot loaded")
    if moves[-1].load != 0:
        bad.append("m{:d}: vehicle returns to the depot loaded"
                   .format(len(moves)))

    for i, move in enumerate(moves, start=1):
        bad.extend(_check_move(i, move, sub, cap))

    for i, (action, before, after) in enumerate(
            zip(actions, moves[:-1], moves[1:]), start=1):
        a, m, n = "a{:d}".format(i), "m{:d}".format(i), "m{:d}".format(i + 1)
        if action.station != before.destination:
            bad.append("{:s}: loc({:s}) != dest({:s})".format(a, a, m))
        if action.station != after.origin:
            bad.append("{:s}: loc({:s}) != orig({:s})".format(a, a, n))
        if action.time != before.arrival:
            bad.append("{:s}: t({:s}) != arr({:s})".format(a, a, m))
        if action.duration < 0:
            bad.append("{:s}: negative duration".format(a))
        ready = action.time + action.duration
        if after.departure < ready:
            bad.append("{:s}: dep({:s}) < t({:s})+dur({:s})"
                       .format(n, n, a, a))
        elif strict and after.departure != ready:
            bad.append("{:s}: dep({:s}) != t({:s})+dur({:s})"
                       .format(n, n, a, a))
        if abs(action.delta) > cap:
            bad.append("{:s}: |delta| {:d} exceeds Cap".format(a, action.delta))
        if action.delta != sum(count for _, count in action.served):
            bad.append("{:s}: delta does not match its served requests"
                       .format(a))
        if after.load != before.load + action.delta:
            bad.append("{:s}: load({:s}) != load({:s}) + delta({:s})"
                       .format(a, n, m, a))

    if len(moves) == len(actions) + 1 and \
            moves[-1].load != moves[0].load + sum(a.delta for a in actions):
        bad.append("loads of tour {} do not telescope".format(tour.vehicle))

    return bad


def validate_schedule(schedule, instance, strict=False):
    """
    Check a complete schedule against an instance.

    Every tour must pass :py:func:`validate_tour` and every ride of the
    instance must be picked up exactly once at its origin and delivered
    exactly once at its destination by the same vehicle, no earlier than
    its release (and its earliest start tick) and, for requests with a
    time window, within the window.

    Parameters
    ----------
    schedule : Schedule
        Schedule to check.

    instance : Instance
        The instance the schedule claims to solve.

    strict : bool, optional
        Passed on to :py:func:`validate_tour`.

    Returns
    -------
    violations : list of str
        Empty when the schedule is feasible.

    """
    bad = []
    k = instance.fleet.k
    if len(schedule.tours) != k:
        bad.append("schedule has {:d} tours, expected {:d}"
                   .format(len(schedule.tours), k))
    for j, tour in enumerate(schedule.tours):
        if tour.vehicle != j:
            bad.append("tour {:d} belongs to vehicle {}"
                       .format(j, tour.vehicle))
        bad.extend("vehicle {}: {:s}".format(tour.vehicle, v)
                   for v in validate_tour(tour, instance, strict=strict))

    picks = defaultdict(list)
    drops = defaultdict(list)
    for tour in schedule.tours:
        for i, action in enumerate(tour.actions):
            for rid, count in action.served:
                target = picks if count > 0 else drops
                target[rid].append((tour.vehicle, i, action, count))

    rides = instance.ride_map
    for rid in sorted(set(picks) | set(drops)):
        if rid not in rides:
            bad.append("action serves unknown request {}".format(rid))
    for rid in schedule.service_map:
        if rid not in rides:
            bad.append("service map names unknown request {}".format(rid))

    for ride in instance.rides:
        rid = ride.id
        p, d = picks.get(rid, []), drops.get(rid, [])
        if not p and not d:
            bad.append("unserved request {}".format(rid))
            continue
        if len(p) != 1 or len(d) != 1:
            bad.append("request {} is picked up {:d} times and delivered "
                       "{:d} times".format(rid, len(p), len(d)))
            continue
        (pv, pi, pa, pc), (dv, di, da, dc) = p[0], d[0]
        if pa.station != ride.origin:
            bad.append("request {} picked up at {} instead of {}"
                       .format(rid, pa.station, ride.origin))
        if da.station != ride.destination:
            bad.append("request {} delivered at {} instead of {}"
                       .format(rid, da.station, ride.destination))
        if pc != ride.load or dc != -ride.load:
            bad.append("request {} moves {:d}/{:d} passengers instead of {:d}"
                       .format(rid, pc, -dc, ride.load))
        if pa.time < ride.release:
            bad.append("request {} picked up at tick {:d} before its release "
                       "{:d}".format(rid, pa.time, ride.release))
        if ride.earliest is not None and pa.time < ride.earliest:
            bad.append("request {} picked up at tick {:d} before p = {:d}"
                       .format(rid, pa.time, ride.earliest))
        if ride.latest_pick is not None and pa.time > ride.latest_pick:
            bad.append("request {} picked up at tick {:d} after q - d(x,y) = "
                       "{:d}".format(rid, pa.time, ride.latest_pick))
        if ride.deadline is not None and da.time > ride.deadline:
            bad.append("request {} delivered at tick {:d} after q = {:d}"
                       .format(rid, da.time, ride.deadline))
        if da.time < ride.reveal:
            bad.append("request {} delivered before delivery request {} is "
                       "released".format(rid, ride.delivery_id))
        if pv != dv:
            bad.append("request {} changes vehicle".format(rid))
        elif di <= pi:
            bad.append("request {} is delivered before it is picked up"
                       .format(rid))
        if schedule.service_map.get(rid) != ((pv, pi), (dv, di)):
            bad.append("service map entry of request {} does not match its "
                       "actions".format(rid))

    return bad


def total_length(schedule):
    """ Sum of the distances driven by all vehicles; waiting is free. """
    return sum(m.length for tour in schedule.tours for m in tour.moves)


def makespan(schedule):
    """ Tick at which the last vehicle is back at the depot (0 for a
    schedule without moves). """
    return max((tour.moves[-1].arrival for tour in schedule.tours
                if tour.moves), default=0)


def evaluate(schedule, objective):
    """ Value of ``schedule`` under ``objective`` (``'length'`` or
    ``'makespan'``). """
    if Objective.parse(objective) is Objective.MAKESPAN:
        return makespan(schedule)
    return total_length(schedule)
