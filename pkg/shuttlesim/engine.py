"""
Event-driven online simulation. Requests become visible to the policies
only at their release ticks; each vehicle is driven by its own copy of a
policy which is queried for a command whenever the vehicle has nothing
left to do. The run is recorded as a trace from which the resulting
schedule is rebuilt.

:License: :doc:`../LICENSE`

"""
import copy
import logging
from collections import Counter, deque
from dataclasses import dataclass, field

from .core import RequestKind
from .exceptions import (PolicyStuck, IllegalCommand, TraceMismatch,
                         ScheduleViolation, NoCoveringSubnetwork)
from .schedule import Schedule, TourBuilder, validate_schedule


__all__ = ['WaitUntil', 'WaitForEvent', 'MoveTo', 'PickUp', 'DropOff',
           'ReturnToDepot', 'RideView', 'VehicleView', 'WorldView', 'Policy',
           'TraceEvent', 'QueryRecord', 'Trace', 'run_online', 'replay',
           'audit_trace', 'end_of_sequence_tick', 'MAX_INSTANT_COMMANDS',
           'RELEASED', 'DEPARTED', 'ARRIVED', 'PICKED', 'DROPPED',
           'END_OF_SEQUENCE']

MAX_INSTANT_COMMANDS = 64

RELEASED = 'released'
DEPARTED = 'departed'
ARRIVED = 'arrived'
PICKED = 'picked'
DROPPED = 'dropped'
END_OF_SEQUENCE = 'end_of_sequence'
EVENT_KINDS = (RELEASED, DEPARTED, ARRIVED, PICKED, DROPPED, END_OF_SEQUENCE)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class WaitUntil:
    tick: int


@dataclass(frozen=True)
class WaitForEvent:
    pass


@dataclass(frozen=True)
class MoveTo:
    """ Drive one edge toward ``station``; the policy is queried again at
    the next station. """
    station: int
    subnetwork: int = None


@dataclass(frozen=True)
class PickUp:
    ids: tuple

    def __post_init__(self):
        object.__setattr__(self, 'ids', tuple(self.ids))


@dataclass(frozen=True)
class DropOff:
    ids: tuple

    def __post_init__(self):
        object.__setattr__(self, 'ids', tuple(self.ids))


@dataclass(frozen=True)
class ReturnToDepot:
    """ Drive one edge toward the depot. """


@dataclass(frozen=True)
class RideView:
    """ What a policy knows about a ride: ``destination`` is `None` while
    it is hidden (pickup requests until the passenger has boarded and the
    linked delivery request is released). """
    id: int
    kind: RequestKind
    release: int
    origin: int
    destination: int
    load: int
    earliest: int = None
    deadline: int = None

    @property
    def ready(self):
        return self.release if self.earliest is None else \
            max(self.release, self.earliest)


@dataclass(frozen=True)
class VehicleView:
    vehicle: int
    station: int
    subnetwork: int
    onboard: tuple
    moving: bool


@dataclass(frozen=True)
class WorldView:
    """
    The state of the world as seen by the policy of one vehicle at one
    decision epoch. It never contains requests released after ``tick``.

    """
    tick: int
    vehicle: int
    station: int
    subnetwork: object
    depot: int
    cap: int
    onboard: tuple
    waiting: tuple
    end_of_sequence: bool
    fleet: tuple = ()

    @property
    def load(self):
        return sum(r.load for r in self.onboard)


class Policy:
    """
    Base class of online dispatch policies.

    The engine gives every vehicle its own copy of the policy (see
    :py:meth:`fork`), binds it to the vehicle's subnetwork and then calls
    :py:meth:`decide` at every decision epoch.

    """
    name = None

    def __init__(self):
        self.vehicle = None
        self.subnetwork = None
        self.depot = None
        self.cap = None

    def bind(self, vehicle, subnetwork, depot, cap):
        self.vehicle = vehicle
        self.subnetwork = subnetwork
        self.depot = depot
        self.cap = cap
        self.reset()

    def reset(self):
        pass

    def decide(self, view):
        raise NotImplementedError

    def fork(self):
        return copy.deepcopy(self)


@dataclass(frozen=True)
class TraceEvent:
    tick: int
    kind: str
    vehicle: int = None
    station: int = None
    payload: int = None


@dataclass(frozen=True)
class QueryRecord:
    """ One policy query: the request ids whose content was visible to the
    policy and the command it answered with. """
    tick: int
    vehicle: int
    station: int
    visible: tuple
    command: str


@dataclass
class Trace:
    events: list = field(default_factory=list)
    queries: list = field(default_factory=list)


def end_of_sequence_tick(instance):
    """ Tick at which the end of the request sequence is announced: one
    tick after the last release, or tick 0 without requests. """
    if not instance.requests:
        return 0
    return max(r.t for r in instance.requests) + 1


_READY = 'ready'
_MOVING = 'moving'
_WAIT_UNTIL = 'wait_until'
_WAIT_EVENT = 'wait_event'


class _Vehicle:
    def __init__(self, index, sub, policy, depot):
        self.index = index
        self.sub = sub
        self.policy = policy
        self.station = depot
        self.onboard = []
        self.status = _READY
        self.arrival = None
        self.wake_at = None


class _Simulation:
    def __init__(self, policy, instance, max_tick=None):
        self.instance = instance
        self.rides = instance.ride_map
        self.depot = instance.depot
        self.cap = instance.cap
        self.trace = Trace()
        self.tick = 0
        self.pending = deque(instance.requests)
        self.eos_tick = end_of_sequence_tick(instance)
        self.eos = False
        self.routed = {}
        self.waiting = {}
        self.carrier = {}
        self.served = set()
        self.ride_of_delivery = {
            r.delivery_id: r.id for r in instance.rides
            if r.kind is RequestKind.PICKUP
        }

        self.vehicles = []
        for j in range(instance.fleet.k):
            sub = instance.vehicle_subnetwork(j)
            own = policy.fork()
            own.bind(j, sub, self.depot, self.cap)
            self.vehicles.append(_Vehicle(j, sub, own, self.depot))

        if max_tick is None:
            latest = max([self.eos_tick] + [r.earliest or 0
                                            for r in instance.rides])
            span = sum(s.length for s in instance.subnetworks)
            max_tick = latest + 2 * (len(instance.rides) + 2) * span
        self.max_tick = max_tick

    def emit(self, kind, vehicle=None, station=None, payload=None):
        event = TraceEvent(self.tick, kind, vehicle, station, payload)
        self.trace.events.append(event)
        log.debug("%s", event)

    def wake(self, j):
        v = self.vehicles[j]
        if v.status in (_WAIT_UNTIL, _WAIT_EVENT):
            v.status = _READY
            v.wake_at = None

    def route(self, ride):
        # Pickup destinations are not known at release.
        known = [ride.origin]
        if ride.kind is not RequestKind.PICKUP:
            known.append(ride.destination)
        for v in self.vehicles:
            if all(v.sub.contains(s) for s in known):
                return v.index
        raise NoCoveringSubnetwork("No vehicle operates on a subnetwork "
                                   "covering request {}.".format(ride.id))

    def release(self, request):
        if request.kind is RequestKind.DELIVERY:
            rid = self.ride_of_delivery[request.id]
            owner = self.carrier.get(rid)
            vehicle = owner if owner is not None else self.routed.get(rid)
            self.emit(RELEASED, vehicle, request.y, request.id)
            if owner is not None:
                self.wake(owner)
            return
        ride = self.rides[request.id]
        j = self.route(ride)
        self.routed[ride.id] = j
        self.waiting[ride.id] = j
        self.emit(RELEASED, j, ride.origin, ride.id)
        self.wake(j)

    def ride_view(self, rid, onboard):
        ride = self.rides[rid]
        destination = ride.destination
        if ride.kind is RequestKind.PICKUP and \
                not (onboard and self.tick >= ride.reveal):
            destination = None
        return RideView(id=ride.id, kind=ride.kind, release=ride.release,
                        origin=ride.origin, destination=destination,
                        load=ride.load, earliest=ride.earliest,
                        deadline=ride.deadline)

    def view(self, v):
        onboard = tuple(self.ride_view(rid, True) for rid in v.onboard)
        waiting = tuple(self.ride_view(rid, False)
                        for rid, j in self.waiting.items() if j == v.index)
        fleet = tuple(
            VehicleView(vehicle=u.index, station=u.station,
                        subnetwork=u.sub.id, onboard=tuple(u.onboard),
                        moving=u.status == _MOVING)
            for u in self.vehicles
        )
        return WorldView(tick=self.tick, vehicle=v.index, station=v.station,
                         subnetwork=v.sub, depot=self.depot, cap=self.cap,
                         onboard=onboard, waiting=waiting,
                         end_of_sequence=self.eos, fleet=fleet)

    def visible_ids(self, view):
        ids = [r.id for r in view.waiting + view.onboard]
        for r in view.onboard:
            if r.kind is RequestKind.PICKUP and r.destination is not None:
                ids.append(self.rides[r.id].delivery_id)
        return tuple(ids)

    def execute(self, v, cmd):
        def illegal(msg):
            raise IllegalCommand("Vehicle {:d} at tick {:d}: {:s}"
                                 .format(v.index, self.tick, msg))

        if isinstance(cmd, WaitUntil):
            if cmd.tick <= self.tick:
                illegal("cannot wait until past tick {}.".format(cmd.tick))
            v.status = _WAIT_UNTIL
            v.wake_at = cmd.tick

        elif isinstance(cmd, WaitForEvent):
            v.status = _WAIT_EVENT

        elif isinstance(cmd, (MoveTo, ReturnToDepot)):
            target = self.depot if isinstance(cmd, ReturnToDepot) else \
                cmd.station
            if isinstance(cmd, MoveTo) and cmd.subnetwork is not None and \
                    cmd.subnetwork != v.sub.id:
                illegal("subnetwork {} is not assigned to the vehicle."
                        .format(cmd.subnetwork))
            if not v.sub.contains(target):
                illegal("station {} is not on subnetwork {}."
                        .format(target, v.sub.id))
            if target == v.station:
                illegal("already at station {}.".format(target))
            nxt = v.sub.next_toward(v.station, target)
            length = v.sub.step_length(v.station, nxt)
            self.emit(DEPARTED, v.index, v.station, nxt)
            v.status = _MOVING
            v.arrival = (self.tick + length, nxt)

        elif isinstance(cmd, PickUp):
            if not cmd.ids or len(set(cmd.ids)) != len(cmd.ids):
                illegal("pickup needs distinct request ids.")
            load = sum(self.rides[rid].load for rid in v.onboard)
            for rid in cmd.ids:
                if self.waiting.get(rid) != v.index:
                    illegal("request {} is not waiting for this vehicle."
                            .format(rid))
                ride = self.rides[rid]
                if ride.origin != v.station:
                    illegal("request {} waits at station {}."
                            .format(rid, ride.origin))
                if ride.ready > self.tick:
                    illegal("request {} cannot be picked up before tick {}."
                            .format(rid, ride.ready))
                load += ride.load
            if load > self.cap:
                illegal("capacity exceeded.")
            for rid in cmd.ids:
                del self.waiting[rid]
                v.onboard.append(rid)
                self.carrier[rid] = v.index
                self.emit(PICKED, v.index, v.station, rid)

        elif isinstance(cmd, DropOff):
            if not cmd.ids or len(set(cmd.ids)) != len(cmd.ids):
                illegal("drop-off needs distinct request ids.")
            for rid in cmd.ids:
                if rid not in v.onboard:
                    illegal("request {} is not on board.".format(rid))
                seen = self.ride_view(rid, True)
                if seen.destination is None:
                    illegal("destination of request {} is not known yet."
                            .format(rid))
                if seen.destination != v.station:
                    illegal("request {} travels to station {}."
                            .format(rid, seen.destination))
            for rid in cmd.ids:
                v.onboard.remove(rid)
                del self.carrier[rid]
                self.served.add(rid)
                self.emit(DROPPED, v.index, v.station, rid)

        else:
            illegal("unknown command {!r}.".format(cmd))

    def decide(self, v):
        for _ in range(MAX_INSTANT_COMMANDS):
            view = self.view(v)
            cmd = v.policy.decide(view)
            self.trace.queries.append(QueryRecord(
                tick=self.tick, vehicle=v.index, station=v.station,
                visible=self.visible_ids(view), command=repr(cmd)
            ))
            self.execute(v, cmd)
            if v.status != _READY:
                return
        raise IllegalCommand("Vehicle {:d} issued more than {:d} commands at "
                             "tick {:d}.".format(v.index,
                                                 MAX_INSTANT_COMMANDS,
                                                 self.tick))

    def step(self):
        while self.pending and self.pending[0].t == self.tick:
            self.release(self.pending.popleft())

        if not self.eos and self.tick == self.eos_tick:
            self.eos = True
            self.emit(END_OF_SEQUENCE)
            for v in self.vehicles:
                self.wake(v.index)

        for v in self.vehicles:
            if v.status == _MOVING and v.arrival[0] == self.tick:
                v.station = v.arrival[1]
                v.arrival = None
                v.status = _READY
                self.emit(ARRIVED, v.index, v.station)
            elif v.status == _WAIT_UNTIL and v.wake_at == self.tick:
                self.wake(v.index)

        for v in self.vehicles:
            if v.status == _READY:
                self.decide(v)

    def next_tick(self):
        ticks = []
        if self.pending:
            ticks.append(self.pending[0].t)
        if not self.eos:
            ticks.append(self.eos_tick)
        for v in self.vehicles:
            if v.status == _MOVING:
                ticks.append(v.arrival[0])
            elif v.status == _WAIT_UNTIL:
                ticks.append(v.wake_at)
        return min(ticks, default=None)

    def run(self):
        while True:
            self.step()
            nxt = self.next_tick()
            if nxt is None:
                break
            if nxt > self.max_tick:
                raise PolicyStuck("No progress by tick {:d}: {:d} of {:d} "
                                  "requests served.".format(
                                      self.max_tick, len(self.served),
                                      len(self.rides)))
            self.tick = nxt

        unserved = sorted(set(self.rides) - self.served)
        if unserved:
            raise PolicyStuck("All vehicles wait for events that will never "
                              "come; requests {} are unserved."
                              .format(unserved))
        for v in self.vehicles:
            if v.station != self.depot:
                raise PolicyStuck("Vehicle {:d} stops at station {} instead "
                                  "of the depot.".format(v.index, v.station))
        return self.trace


def run_online(policy, instance, validate=True, max_tick=None):
    """
    Simulate an online policy on an instance.

    Parameters
    ----------
    policy : Policy, str
        A policy object or a registered policy name (``'sir'``,
        ``'sif_m'``, ``'sif_e'``, ``'main'``).

    instance : Instance
        The instance to simulate. Its requests are revealed to the policy
        at their release ticks only.

    validate : bool, optional
        Check the resulting schedule with
        :py:func:`~shuttlesim.schedule.validate_schedule`.

    max_tick : int, None, optional
        Abort with `PolicyStuck` when the simulation runs past this tick.
        The default allows two sweeps of every subnetwork per request after
        the last release.

    Returns
    -------
    schedule : Schedule
        The schedule the vehicles drove, rebuilt from the trace.

    trace : Trace
        Event log and the record of every policy query.

    Raises
    ------
    PolicyStuck
        When the policy stops making progress while requests are unserved
        or a vehicle is away from the depot.

    IllegalCommand
        When the policy issues a command that cannot be executed.

    ScheduleViolation
        When ``validate`` is `True` and the schedule is infeasible.

    Examples
    --------
    >>> from shuttlesim.generators import gen_example
    >>> from shuttlesim.schedule import total_length
    >>> schedule, trace = run_online('sir', gen_example('ex1_sir_length'))
    >>> total_length(schedule)
    48

    """
    if isinstance(policy, str):
        from .algorithms import get_policy
        policy = get_policy(policy)
    trace = _Simulation(policy, instance, max_tick=max_tick).run()
    schedule = replay(trace, instance)
    if validate:
        violations = validate_schedule(schedule, instance)
        if violations:
            raise ScheduleViolation(violations)
    log.info("%s on %s: %d events, %d policy queries",
             policy.name, instance.name or 'instance', len(trace.events),
             len(trace.queries))
    return schedule, trace


def replay(trace, instance):
    """
    Rebuild the schedule of an online run from its trace.

    Raises
    ------
    TraceMismatch
        When the trace is not consistent with the instance: ticks that
        decrease, releases off their release tick, moves that are not
        single subnetwork edges driven at unit speed, or passenger
        exchanges away from the vehicle's position.

    """
    k = instance.fleet.k
    depot = instance.depot
    builders = [TourBuilder(j, depot, instance.fleet.assignment[j])
                for j in range(k)]
    position = [depot] * k
    departed = [None] * k
    eos_tick = end_of_sequence_tick(instance)
    last = 0

    for n, ev in enumerate(trace.events):
        def fail(msg):
            raise TraceMismatch("Event {:d} ({:s} at tick {}): {:s}"
                                .format(n, ev.kind, ev.tick, msg))

        if ev.tick < last:
            fail("ticks decrease.")
        last = ev.tick

        if ev.kind == RELEASED:
            try:
                request = instance.request(ev.payload)
            except KeyError:
                fail("unknown request.")
            if request.t != ev.tick:
                fail("request {} is released at tick {:d}."
                     .format(request.id, request.t))
            continue
        if ev.kind == END_OF_SEQUENCE:
            if ev.tick != eos_tick:
                fail("end of sequence is due at tick {:d}.".format(eos_tick))
            continue

        j = ev.vehicle
        if j is None or not 0 <= j < k:
            fail("unknown vehicle {}.".format(j))
        sub = instance.vehicle_subnetwork(j)

        try:
            if ev.kind == DEPARTED:
                if departed[j] is not None or ev.station != position[j]:
                    fail("vehicle {} is not at station {}."
                         .format(j, ev.station))
                if sub.step_length(ev.station, ev.payload) is None:
                    fail("direction ({} -> {}) is not allowed."
                         .format(ev.station, ev.payload))
                departed[j] = (ev.tick, ev.payload)

            elif ev.kind == ARRIVED:
                if departed[j] is None or departed[j][1] != ev.station:
                    fail("vehicle {} is not heading to station {}."
                         .format(j, ev.station))
                start = departed[j][0]
                if ev.tick - start != sub.step_length(position[j],
                                                      ev.station):
                    fail("edge length does not match the travel time.")
                builders[j].travel(ev.station, start, ev.tick)
                position[j] = ev.station
                departed[j] = None

            elif ev.kind in (PICKED, DROPPED):
                if departed[j] is not None or ev.station != position[j]:
                    fail("vehicle {} is not at station {}."
                         .format(j, ev.station))
                ride = instance.ride_map.get(ev.payload)
                if ride is None:
                    fail("unknown request.")
                sign = 1 if ev.kind == PICKED else -1
                builders[j].act(ev.tick, ((ride.id, sign * ride.load),))

            else:
                fail("unknown event kind.")
        except ScheduleViolation as e:
            fail("; ".join(e.violations))

    if any(d is not None for d in departed):
        raise TraceMismatch("Trace ends while a vehicle is driving.")
    return Schedule.from_tours([b.finish() for b in builders])


def audit_trace(trace, instance):
    """
    Audit a trace for non-clairvoyance and passenger conservation.

    Returns
    -------
    violations : list of str
        Policy queries that exposed requests released later than the
        query tick, rides not picked up and delivered exactly once, drops
        by a vehicle that does not carry the ride, loads above capacity and
        decreasing event ticks.

    """
    bad = []
    for q in trace.queries:
        for rid in q.visible:
            t = instance.request(rid).t
            if t > q.tick:
                bad.append("query at tick {:d} by vehicle {} saw request {} "
                           "released at tick {:d}".format(q.tick, q.vehicle,
                                                          rid, t))

    picks = Counter()
    drops = Counter()
    carrier = {}
    load = Counter()
    last = 0
    for ev in trace.events:
        if ev.tick < last:
            bad.append("event ticks decrease at tick {:d}".format(ev.tick))
        last = ev.tick
        if ev.kind not in (PICKED, DROPPED):
            continue
        ride = instance.ride_map.get(ev.payload)
        if ride is None:
            bad.append("event for unknown request {}".format(ev.payload))
            continue
        if ev.kind == PICKED:
            picks[ride.id] += 1
            carrier[ride.id] = ev.vehicle
            load[ev.vehicle] += ride.load
            if load[ev.vehicle] > instance.cap:
                bad.append("vehicle {} carries {:d} passengers at tick {:d}"
                           .format(ev.vehicle, load[ev.vehicle], ev.tick))
        else:
            drops[ride.id] += 1
            if carrier.get(ride.id) != ev.vehicle:
                bad.append("vehicle {} drops request {} it does not carry"
                           .format(ev.vehicle, ride.id))
            load[ev.vehicle] -= ride.load

    for ride in instance.rides:
        if picks[ride.id] != 1 or drops[ride.id] != 1:
            bad.append("request {} is picked up {:d} and dropped {:d} times"
                       .format(ride.id, picks[ride.id], drops[ride.id]))
    return bad
