"""
Exact offline optimum for small instances and competitive ratios.

The oracle knows the whole request sequence in advance but obeys the same
rules as the online vehicles: release ticks, time windows, capacity,
driving directions and depot start and end. A single vehicle is solved by
best-first search over states ``(position, pending rides, rides on
board)``. Every transition drives straight to the station of the next
pickup or delivery and acts there as early as allowed; any feasible
schedule can be turned into one of these without driving more or
finishing later, so the search is exact. Fleets of several vehicles are
solved by enumerating which vehicle serves which ride.

:License: :doc:`../LICENSE`

"""
import heapq
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction

from .core import Objective
from .exceptions import InstanceTooLarge, Infeasible, ZeroOptimum
from .schedule import Schedule, TourBuilder, evaluate


__all__ = ['OptResult', 'opt_cost', 'competitive_ratio', 'exact_ratio',
           'DEFAULT_MAX_REQUESTS', 'DEFAULT_MAX_STATIONS',
           'DEFAULT_MAX_VEHICLES']

DEFAULT_MAX_REQUESTS = 12
DEFAULT_MAX_STATIONS = 8
DEFAULT_MAX_VEHICLES = 2

_PICK = 'pick'
_DROP = 'drop'
_FINISH = 'finish'

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class OptResult:
    """ Optimal cost, a schedule attaining it and the number of search
    states expanded to prove optimality. """
    cost: int
    schedule: Schedule
    explored: int
    objective: Objective


class _Label:
    __slots__ = ('cost', 'tick', 'pos', 'pending', 'onboard', 'parent',
                 'event', 'alive')

    def __init__(self, cost, tick, pos, pending, onboard, parent, event):
        self.cost = cost
        self.tick = tick
        self.pos = pos
        self.pending = pending
        self.onboard = onboard
        self.parent = parent
        self.event = event
        self.alive = True


class _Search:
    def __init__(self, sub, depot, cap, rides, objective):
        self.depot = depot
        self.cap = cap
        self.rides = rides
        self.makespan = objective is Objective.MAKESPAN
        self.dist = {(u, v): sub.travel(u, v)
                     for u in sub.stations for v in sub.stations}
        self.labels = {}
        self.heap = []
        self.counter = itertools.count()
        self.explored = 0

    def estimate(self, lab):
        """ Lower bound on the final objective value reachable from
        ``lab``, or `None` when a time window can no longer be met. """
        d = self.dist
        pos, tick, depot = lab.pos, lab.tick, self.depot
        if self.makespan:
            best = tick + d[pos, depot]
        else:
            best = d[pos, depot]
        for i, r in enumerate(self.rides):
            bit = 1 << i
            if lab.pending & bit:
                pick = max(tick + d[pos, r.origin], r.ready)
                if r.latest_pick is not None and pick > r.latest_pick:
                    return None
                if self.makespan:
                    drop = max(pick + d[r.origin, r.destination], r.reveal)
                    best = max(best, drop + d[r.destination, depot])
                else:
                    best = max(best, d[pos, r.origin] +
                               d[r.origin, r.destination] +
                               d[r.destination, depot])
            elif lab.onboard & bit:
                drop = max(tick + d[pos, r.destination], r.reveal)
                if r.deadline is not None and drop > r.deadline:
                    return None
                if self.makespan:
                    best = max(best, drop + d[r.destination, depot])
                else:
                    best = max(best, d[pos, r.destination] +
                               d[r.destination, depot])
        return best if self.makespan else lab.cost + best

    def dominated(self, lab):
        key = (lab.pos, lab.pending, lab.onboard)
        others = self.labels.setdefault(key, [])
        for other in others:
            if other.cost <= lab.cost and other.tick <= lab.tick:
                return True
        keep = []
        for other in others:
            if lab.cost <= other.cost and lab.tick <= other.tick:
                other.alive = False
            else:
                keep.append(other)
        keep.append(lab)
        self.labels[key] = keep
        return False

    def push(self, lab, done=False):
        if done:
            bound = lab.tick if self.makespan else lab.cost
        else:
            bound = self.estimate(lab)
            if bound is None or self.dominated(lab):
                return
        # among equal bounds, expand the most advanced label first
        progress = 2 * len(self.rides) + 1 if done else \
            2 * len(self.rides) - 2 * bin(lab.pending).count('1') - \
            bin(lab.onboard).count('1')
        second = lab.cost if self.makespan else lab.tick
        heapq.heappush(self.heap, (bound, -progress, second,
                                   next(self.counter), done, lab))

    def successors(self, lab):
        d = self.dist
        load = sum(r.load for i, r in enumerate(self.rides)
                   if lab.onboard & (1 << i))
        for i, r in enumerate(self.rides):
            bit = 1 << i
            if lab.pending & bit:
                if load + r.load > self.cap:
                    continue
                step = d[lab.pos, r.origin]
                tick = max(lab.tick + step, r.ready)
                if r.latest_pick is not None and tick > r.latest_pick:
                    continue
                yield _Label(lab.cost + step, tick, r.origin,
                             lab.pending & ~bit, lab.onboard | bit, lab,
                             (_PICK, i, tick))
            elif lab.onboard & bit:
                step = d[lab.pos, r.destination]
                tick = max(lab.tick + step, r.reveal)
                if r.deadline is not None and tick > r.deadline:
                    continue
                yield _Label(lab.cost + step, tick, r.destination,
                             lab.pending, lab.onboard & ~bit, lab,
                             (_DROP, i, tick))

    def run(self):
        """ Returns ``(cost, events)`` of an optimal tour or `None`. """
        n = len(self.rides)
        self.push(_Label(0, 0, self.depot, (1 << n) - 1, 0, None, None))
        while self.heap:
            bound, _, _, _, done, lab = heapq.heappop(self.heap)
            if not lab.alive:
                continue
            self.explored += 1
            if done:
                events = []
                node = lab
                while node.parent is not None:
                    events.append(node.event)
                    node = node.parent
                return bound, events[::-1]
            if not lab.pending and not lab.onboard:
                step = self.dist[lab.pos, self.depot]
                self.push(_Label(lab.cost + step, lab.tick + step,
                                 self.depot, 0, 0, lab,
                                 (_FINISH, None, lab.tick + step)),
                          done=True)
                continue
            for nxt in self.successors(lab):
                self.push(nxt)
        return None


def _witness_tour(vehicle, sub, depot, rides, events):
    builder = TourBuilder(vehicle, depot, sub.id)
    for kind, i, tick in events:
        if kind == _FINISH:
            station = depot
        else:
            r = rides[i]
            station = r.origin if kind == _PICK else r.destination
        clock = builder.tick
        path = sub.path(builder.station, station)
        for u, v in zip(path[:-1], path[1:]):
            step = sub.step_length(u, v)
            builder.travel(v, clock, clock + step)
            clock += step
        if kind == _FINISH:
            break
        count = r.load if kind == _PICK else -r.load
        builder.act(tick, ((r.id, count),))
    return builder.finish()


def opt_cost(instance, objective=None, max_requests=DEFAULT_MAX_REQUESTS,
             max_stations=DEFAULT_MAX_STATIONS,
             max_vehicles=DEFAULT_MAX_VEHICLES):
    """
    Compute the clairvoyant optimum of an instance.

    Parameters
    ----------
    instance : Instance
        A desk-scale instance.

    objective : Objective, str, None, optional
        ``'length'`` or ``'makespan'``; defaults to the instance's own
        objective.

    max_requests, max_stations, max_vehicles : int, optional
        Size guard: number of requests, stations per subnetwork and fleet
        size beyond which the search is refused.

    Returns
    -------
    result : OptResult
        Optimal cost with a witness schedule.

    Raises
    ------
    InstanceTooLarge
        When the instance exceeds the size guard.

    Infeasible
        When no schedule meets every time window.

    Examples
    --------
    >>> from shuttlesim.generators import gen_example
    >>> opt_cost(gen_example('ex4_sifm_makespan')).cost
    8

    """
    objective = instance.objective if objective is None else \
        Objective.parse(objective)
    if len(instance.requests) > max_requests:
        raise InstanceTooLarge("Instance has {:d} requests; the oracle "
                               "accepts at most {:d}."
                               .format(len(instance.requests), max_requests))
    if instance.fleet.k > max_vehicles:
        raise InstanceTooLarge("Instance has {:d} vehicles; the oracle "
                               "accepts at most {:d}."
                               .format(instance.fleet.k, max_vehicles))
    for sub in instance.subnetworks:
        if len(sub.stations) > max_stations:
            raise InstanceTooLarge("Subnetwork {} has {:d} stations; the "
                                   "oracle accepts at most {:d}."
                                   .format(sub.id, len(sub.stations),
                                           max_stations))

    k = instance.fleet.k
    depot = instance.depot
    rides = instance.rides
    subs = [instance.vehicle_subnetwork(j) for j in range(k)]
    options = []
    for r in rides:
        fits = [j for j in range(k) if subs[j].contains(r.origin) and
                subs[j].contains(r.destination)]
        if not fits:
            raise Infeasible("No vehicle can carry request {}.".format(r.id))
        options.append(fits)

    memo = {}
    explored = 0

    def solve(j, part):
        nonlocal explored
        key = (subs[j].id, part)
        if key not in memo:
            if not part:
                memo[key] = (0, [])
            else:
                search = _Search(subs[j], depot, instance.cap,
                                 [rides[i] for i in part], objective)
                memo[key] = search.run()
                explored += search.explored
        return memo[key]

    best = None
    for assign in itertools.product(*options):
        parts = [tuple(i for i, a in enumerate(assign) if a == j)
                 for j in range(k)]
        solved = [solve(j, parts[j]) for j in range(k)]
        if any(s is None for s in solved):
            continue
        costs = [s[0] for s in solved]
        cost = max(costs) if objective is Objective.MAKESPAN else sum(costs)
        if best is None or cost < best[0]:
            best = (cost, parts, solved)

    if best is None:
        raise Infeasible("No schedule meets every time window.")

    cost, parts, solved = best
    tours = [_witness_tour(j, subs[j], depot,
                           [rides[i] for i in parts[j]], solved[j][1])
             for j in range(k)]
    schedule = Schedule.from_tours(tours)
    log.info("optimal %s of %s: %d (%d states explored)", objective.value,
             instance.name or 'instance', cost, explored)
    return OptResult(cost=cost, schedule=schedule, explored=explored,
                     objective=objective)


def exact_ratio(alg, opt):
    """
    ``alg / opt`` as a `~fractions.Fraction`; ``0 / 0`` is 1.

    Examples
    --------
    >>> exact_ratio(32, 17)
    Fraction(32, 17)
    >>> exact_ratio(0, 0)
    Fraction(1, 1)

    """
    if opt == 0:
        if alg == 0:
            return Fraction(1)
        raise ZeroOptimum("The optimum is 0 while the online cost is {}."
                          .format(alg))
    return Fraction(alg, opt)


def competitive_ratio(policy, instance, objective=None, opt=None):
    """
    Ratio between the cost of an online policy and the optimum.

    Parameters
    ----------
    policy : Policy, str
        Online policy (or its registered name).

    instance : Instance
        Instance to evaluate.

    objective : Objective, str, None, optional
        Defaults to the instance's objective.

    opt : int, None, optional
        Known optimal cost; computed with :py:func:`opt_cost` when `None`.

    Returns
    -------
    ratio : fractions.Fraction
        Exact ratio ``ALG / OPT``.

    Raises
    ------
    ZeroOptimum
        When the optimum is 0 but the policy's cost is not.

    """
    from .engine import run_online

    objective = instance.objective if objective is None else \
        Objective.parse(objective)
    schedule, _ = run_online(policy, instance)
    alg = evaluate(schedule, objective)
    if opt is None:
        opt = opt_cost(instance, objective).cost
    return exact_ratio(alg, opt)
