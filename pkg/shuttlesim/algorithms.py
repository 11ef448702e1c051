"""
Online dispatch policies.

Tram mode (circuits, fixed driving direction):

* ``sir``   -- *stop if requested*: wait at the origin and run a full round
  whenever somebody is waiting or on board.
* ``sif_m`` -- *start if full*, morning flavour: passengers board at the
  origin; the vehicle leaves when it is full.
* ``sif_e`` -- *start if full*, evening flavour: passengers travel to the
  origin; the vehicle leaves once the released loads fill it.

Elevator mode (lines, both directions):

* ``main``  -- *move away if necessary*: serve requests travelling away
  from the origin in outward sweeps, everything else while sweeping back.

:License: :doc:`../LICENSE`

"""
import logging
from dataclasses import dataclass

from .core import RequestKind
from .engine import (Policy, WaitUntil, WaitForEvent, MoveTo, PickUp,
                     DropOff, ReturnToDepot)
from .exceptions import (AssignedToLine, AssignedToCircuit, NonOriginPickup,
                         NonOriginDropoff, UnknownLoad, UnknownPolicy)


__all__ = ['SIR', 'SIFM', 'SIFE', 'MAIN', 'sir_policy', 'sif_m_policy',
           'sif_e_policy', 'main_policy', 'get_policy', 'first_fit',
           'SUPPORTED_POLICIES']

log = logging.getLogger(__name__)


def first_fit(rides, room):
    """
    Select rides in the given (release) order as long as their loads fit.

    Parameters
    ----------
    rides : iterable of RideView
        Candidate rides, in priority order.

    room : int
        Free seats.

    Returns
    -------
    ids : list of int
        Ids of the selected rides. A ride that does not fit is skipped and
        later, smaller rides may still be selected.

    Examples
    --------
    >>> from collections import namedtuple
    >>> R = namedtuple('R', 'id load')
    >>> first_fit([R(1, 2), R(2, 2), R(3, 1)], 3)
    [1, 3]

    """
    ids = []
    for r in rides:
        if r.load <= room:
            ids.append(r.id)
            room -= r.load
    return ids


def _drops(view):
    return [r.id for r in view.onboard if r.destination == view.station]


def _ready(view):
    return [r for r in view.waiting if r.ready <= view.tick]


def _not_ready_wait(view):
    later = [r.ready for r in view.waiting if r.ready > view.tick]
    return WaitUntil(min(later)) if later else None


class _TramPolicy(Policy):
    """ Shared behaviour of the circuit policies. """

    def bind(self, vehicle, subnetwork, depot, cap):
        if not subnetwork.is_circuit:
            raise AssignedToLine("{:s} runs on circuits; vehicle {} is "
                                 "assigned to line {}."
                                 .format(self.name, vehicle, subnetwork.id))
        super().bind(vehicle, subnetwork, depot, cap)

    def go_home(self, view):
        if view.station == view.depot:
            return WaitForEvent()
        return ReturnToDepot()

    def keep_driving(self, view):
        """ Away from the origin: finish the round, or head for the depot
        when nothing is left to do after the end of the sequence. """
        if view.end_of_sequence and not view.onboard and not view.waiting:
            return self.go_home(view)
        return MoveTo(self.subnetwork.successor(view.station))

    def idle(self, view):
        wait = _not_ready_wait(view)
        if wait is not None:
            return wait
        if view.end_of_sequence and not view.onboard and not view.waiting:
            return self.go_home(view)
        return WaitForEvent()


class SIR(_TramPolicy):
    """
    Stop if requested.

    The vehicle waits at the origin of its circuit. As soon as a passenger
    is waiting (or still on board) it drives one full round, stopping
    wherever passengers leave or enter. Waiting passengers board whenever
    there is room; a passenger whose destination lies behind the vehicle
    stays on board through the origin into the next round.

    """
    name = 'sir'

    def decide(self, view):
        drops = _drops(view)
        if drops:
            return DropOff(drops)

        here = [r for r in _ready(view) if r.origin == view.station]
        board = first_fit(here, self.cap - view.load)
        if board:
            return PickUp(board)

        if view.station != self.subnetwork.origin:
            return self.keep_driving(view)

        known = any(r.destination is not None for r in view.onboard)
        if known or _ready(view):
            return MoveTo(self.subnetwork.successor(view.station))
        return self.idle(view)


class SIFM(_TramPolicy):
    """
    Start if full, for morning traffic leaving the origin.

    Passengers board at the origin in release order. The vehicle departs
    for a full round when it is full or the next passenger in line does
    not fit; after the end of the sequence it also leaves partially
    loaded.

    """
    name = 'sif_m'

    def decide(self, view):
        origin = self.subnetwork.origin
        for r in view.waiting:
            if r.origin != origin:
                raise NonOriginPickup(
                    "sif_m serves requests starting at the origin {}; "
                    "request {} starts at {}.".format(origin, r.id, r.origin))

        drops = _drops(view)
        if drops:
            return DropOff(drops)

        if view.station != origin:
            return self.keep_driving(view)

        queue = _ready(view)
        room = self.cap - view.load
        board = []
        for r in queue:
            if r.load > room:
                break
            board.append(r.id)
            room -= r.load
        if board:
            return PickUp(board)

        blocked = len(queue) > 0
        if view.onboard and (room == 0 or blocked or view.end_of_sequence):
            return MoveTo(self.subnetwork.successor(origin))
        return self.idle(view)


class SIFE(_TramPolicy):
    """
    Start if full, for evening traffic returning to the origin.

    The vehicle waits at the origin until the released loads add up to its
    capacity, then drives one round collecting the selected passengers
    (release order, first fit) and returns full. After the end of the
    sequence remaining passengers are collected in partial rounds.

    """
    name = 'sif_e'

    def reset(self):
        self.selected = set()

    def decide(self, view):
        origin = self.subnetwork.origin
        for r in view.waiting:
            if r.kind is RequestKind.PICKUP:
                raise UnknownLoad("sif_e needs the destination and load of "
                                  "request {} at release.".format(r.id))
            if r.destination != origin:
                raise NonOriginDropoff(
                    "sif_e serves requests ending at the origin {}; request "
                    "{} ends at {}.".format(origin, r.id, r.destination))

        drops = _drops(view)
        if drops:
            return DropOff(drops)

        if view.station != origin:
            board = [r.id for r in _ready(view)
                     if r.id in self.selected and r.origin == view.station]
            if board:
                self.selected.difference_update(board)
                return PickUp(board)
            return self.keep_driving(view)

        self.selected.clear()
        queue = _ready(view)
        if queue and (sum(r.load for r in queue) >= self.cap or
                      view.end_of_sequence):
            chosen = first_fit(queue, self.cap - view.load)
            self.selected.update(chosen)
            log.debug("sif_e vehicle %s leaves at tick %d for %s",
                      self.vehicle, view.tick, sorted(chosen))
            return MoveTo(self.subnetwork.successor(origin))
        return self.idle(view)


@dataclass
class _Sweep:
    phase: str
    target: int
    riders: frozenset = frozenset()


class MAIN(Policy):
    """
    Move away if necessary.

    At every decision the vehicle at position ``s`` looks at the waiting
    requests that travel away from the origin and start at or beyond ``s``.
    If there are any, it picks the first of them in release order that fit
    and sweeps outward to the furthest of their destinations. Otherwise it
    serves the requests travelling toward the origin while sweeping back,
    first driving out to the furthest such pickup if it lies beyond ``s``.
    A sweep is driven to its end before the next decision. With nothing to
    do the vehicle idles where it is; after the end of the sequence it
    returns to the origin and then to the depot.

    """
    name = 'main'

    def bind(self, vehicle, subnetwork, depot, cap):
        if subnetwork.is_circuit:
            raise AssignedToCircuit("main runs on lines; vehicle {} is "
                                    "assigned to circuit {}."
                                    .format(vehicle, subnetwork.id))
        super().bind(vehicle, subnetwork, depot, cap)

    def reset(self):
        # the tour starts at the depot, the first sweep ends at the origin
        self.sweep = _Sweep('return', self.subnetwork.origin)
        self.homing = False

    def off(self, station):
        return self.subnetwork.offset(station)

    def plan(self, view):
        s = self.off(view.station)
        ready = _ready(view)
        away = [r for r in ready if self.off(r.origin) >= s and
                (r.destination is None or
                 self.off(r.destination) > self.off(r.origin))]
        riders = first_fit(away, self.cap - view.load)
        ahead = [self.off(r.destination) for r in view.onboard
                 if r.destination is not None and
                 self.off(r.destination) > s]
        if riders or ahead:
            chosen = [r for r in away if r.id in riders]
            reach = ahead + [self.off(r.origin) for r in chosen] + \
                [self.off(r.destination) for r in chosen
                 if r.destination is not None]
            return _Sweep('away', self.station_at(max(reach)),
                          frozenset(riders))

        toward = [r for r in ready if r.destination is not None and
                  self.off(r.destination) < self.off(r.origin)]
        origin = self.subnetwork.origin
        if toward:
            far = max(self.off(r.origin) for r in toward)
            if far > s:
                return _Sweep('reach', self.station_at(far))
            return _Sweep('return', origin)
        behind = [r for r in view.onboard if r.destination is not None]
        if (view.waiting or behind) and view.station != origin:
            return _Sweep('return', origin)
        return None

    def station_at(self, offset):
        for station in self.subnetwork.stations:
            if self.off(station) == offset:
                return station

    def decide(self, view):
        drops = _drops(view)
        if drops:
            return DropOff(drops)

        sweep = self.sweep
        if view.end_of_sequence and not view.waiting and not view.onboard:
            sweep = None
        if sweep is not None and view.station == sweep.target:
            if sweep.phase == 'reach':
                sweep = _Sweep('return', self.subnetwork.origin)
            else:
                sweep = None
        if sweep is None:
            sweep = self.plan(view)
            if sweep is not None:
                log.debug("main vehicle %s at tick %d: %s sweep to %s",
                          self.vehicle, view.tick, sweep.phase, sweep.target)
        self.sweep = sweep

        if sweep is None:
            return self.idle(view)

        here = [r for r in _ready(view) if r.origin == view.station]
        if sweep.phase == 'away':
            here = [r for r in here if r.id in sweep.riders]
        elif sweep.phase == 'return':
            here = [r for r in here if r.destination is not None and
                    self.off(r.destination) < self.off(r.origin)]
        else:
            here = []
        board = first_fit(here, self.cap - view.load)
        if board:
            return PickUp(board)
        if view.station == sweep.target:
            self.sweep = None
            return self.decide(view)
        return MoveTo(sweep.target)

    def idle(self, view):
        wait = _not_ready_wait(view)
        if wait is not None:
            return wait
        if view.end_of_sequence and not view.onboard and not view.waiting:
            origin = self.subnetwork.origin
            if view.station == origin:
                self.homing = True
            if view.station == view.depot:
                return WaitForEvent()
            if self.homing:
                return ReturnToDepot()
            return MoveTo(origin)
        return WaitForEvent()


SUPPORTED_POLICIES = {
    SIR.name: SIR,
    SIFM.name: SIFM,
    SIFE.name: SIFE,
    MAIN.name: MAIN,
}


def sir_policy():
    return SIR()


def sif_m_policy():
    return SIFM()


def sif_e_policy():
    return SIFE()


def main_policy():
    return MAIN()


def get_policy(name):
    """
    Create a policy by name.

    Examples
    --------
    >>> get_policy('sif_m').name
    'sif_m'

    """
    try:
        return SUPPORTED_POLICIES[str(name).strip().lower()]()
    except KeyError:
        raise UnknownPolicy("Unknown policy '{}'. Supported policies are: "
                            "{:s}.".format(name,
                                           ', '.join(SUPPORTED_POLICIES)))
