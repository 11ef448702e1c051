"""
A module that provides the static world model of a shuttle fleet: the
station network and its metric closure, circuit and line subnetworks,
customer requests and the tasks derived from them, the fleet configuration
and the instance container that ties everything together.

:License: :doc:`../LICENSE`

"""
import enum
import functools
import itertools
import logging
from dataclasses import dataclass

import numpy as np

from .exceptions import (GraphNotConnected, NotOnSubnetwork,
                         NoCoveringSubnetwork, InfeasibleWindow, LabelError,
                         InstanceError, BadParams)


__all__ = ['SubnetworkKind', 'RequestKind', 'TaskKind', 'Scenario',
           'Objective', 'Network', 'MetricClosure', 'Subnetwork', 'Request',
           'Task', 'FleetConfig', 'Ride', 'Instance', 'build_metric',
           'circuit_distance', 'covering_subnetworks', 'make_task',
           'validate_partition', 'STATION_LABELS']

STATION_LABELS = ('parking', 'building', 'restaurant')

log = logging.getLogger(__name__)


class _NamedEnum(enum.Enum):
    @classmethod
    def parse(cls, value):
        """ Accept a member, its value or its name (case and ``_``/``-``
        insensitive). """
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace('-', '').replace('_', '')
        for member in cls:
            if key in (member.value.replace('_', ''),
                       member.name.lower().replace('_', '')):
                return member
        raise BadParams("Unknown {:s} '{}'. Expected one of: {:s}.".format(
            cls.__name__, value, ', '.join(m.value for m in cls)))

    def __str__(self):
        return self.value


class SubnetworkKind(_NamedEnum):
    CIRCUIT = 'circuit'
    LINE = 'line'


class RequestKind(_NamedEnum):
    PICKUP = 'pickup'
    DELIVERY = 'delivery'
    PDP = 'pdp'
    FULL = 'full'


class TaskKind(_NamedEnum):
    PICKUP_TASK = 'pickup_task'
    DELIVERY_TASK = 'delivery_task'
    PDP_TASK = 'pdp_task'
    FULL_TASK = 'full_task'


class Scenario(_NamedEnum):
    MORNING = 'morning'
    EVENING = 'evening'
    LUNCH = 'lunch'
    EMERGENCY = 'emergency'
    OTHER = 'other'


class Objective(_NamedEnum):
    TOTAL_TOUR_LENGTH = 'length'
    MAKESPAN = 'makespan'


_TASK_OF_REQUEST = {
    RequestKind.PICKUP: TaskKind.PICKUP_TASK,
    RequestKind.DELIVERY: TaskKind.DELIVERY_TASK,
    RequestKind.PDP: TaskKind.PDP_TASK,
    RequestKind.FULL: TaskKind.FULL_TASK,
}


@dataclass(frozen=True)
class Network:
    """
    Undirected station graph with integer edge lengths and a depot.

    Parameters
    ----------
    nodes : iterable of int
        Station identifiers.

    edges : iterable of tuple
        ``(u, v, length)`` triples; ``length`` is a positive number of ticks.

    depot : int
        The station where all vehicles are parked outside of operation.

    labels : iterable of tuple, optional
        ``(station, label)`` pairs attaching one of ``'parking'``,
        ``'building'`` or ``'restaurant'`` to a station.

    """
    nodes: tuple
    edges: tuple
    depot: int
    labels: tuple = ()

    def __post_init__(self):
        nodes = tuple(int(v) for v in self.nodes)
        if len(set(nodes)) != len(nodes):
            raise InstanceError("Network station identifiers must be unique.")
        if not nodes:
            raise InstanceError("A network needs at least one station.")
        nodes = tuple(sorted(nodes))
        known = set(nodes)

        edges = []
        seen = set()
        for u, v, length in self.edges:
            u, v, length = int(u), int(v), int(length)
            if u not in known or v not in known:
                raise InstanceError("Edge ({:d}, {:d}) references an unknown "
                                    "station.".format(u, v))
            if u == v:
                raise InstanceError("Self-loop at station {:d} is not "
                                    "allowed.".format(u))
            if length < 1:
                raise InstanceError("Edge ({:d}, {:d}) must have a length of "
                                    "at least one tick.".format(u, v))
            key = frozenset((u, v))
            if key in seen:
                raise InstanceError("Duplicate edge between stations {:d} and "
                                    "{:d}.".format(u, v))
            seen.add(key)
            edges.append((u, v, length))

        depot = int(self.depot)
        if depot not in known:
            raise InstanceError("Depot {:d} is not a station of the "
                                "network.".format(depot))

        labels = tuple(sorted((int(s), str(lb)) for s, lb in
                              dict(self.labels).items()))
        for s, _ in labels:
            if s not in known:
                raise InstanceError("Label attached to unknown station "
                                    "{:d}.".format(s))

        object.__setattr__(self, 'nodes', nodes)
        object.__setattr__(self, 'edges', tuple(edges))
        object.__setattr__(self, 'depot', depot)
        object.__setattr__(self, 'labels', labels)

    @functools.cached_property
    def _lengths(self):
        return {frozenset((u, v)): length for u, v, length in self.edges}

    @functools.cached_property
    def _label_map(self):
        return dict(self.labels)

    def has_edge(self, u, v):
        return frozenset((u, v)) in self._lengths

    def edge_length(self, u, v):
        try:
            return self._lengths[frozenset((u, v))]
        except KeyError:
            raise InstanceError("Stations {} and {} are not adjacent in the "
                                "network.".format(u, v)) from None

    def label(self, station):
        return self._label_map.get(station)

    def stations_labeled(self, label):
        return tuple(s for s, lb in self.labels if lb == label)


@dataclass(frozen=True, eq=False)
class MetricClosure:
    """ Shortest-path distances between all pairs of stations. """
    nodes: tuple
    dist: np.ndarray

    @functools.cached_property
    def index(self):
        return {v: i for i, v in enumerate(self.nodes)}

    def d(self, u, v):
        try:
            return int(self.dist[self.index[u], self.index[v]])
        except KeyError:
            raise InstanceError("Unknown station in distance query "
                                "({}, {}).".format(u, v)) from None

    __call__ = d


def build_metric(network):
    """
    Compute the metric closure of a network.

    Parameters
    ----------
    network : Network
        A connected station network.

    Returns
    -------
    metric : MetricClosure
        Shortest-path lengths between all stations, as a read-only
        `numpy.ndarray` of integer ticks.

    Raises
    ------
    GraphNotConnected
        When some station cannot be reached from the others.

    Examples
    --------
    >>> from shuttlesim.core import Network, build_metric
    >>> net = Network(nodes=[1, 2, 3, 4], depot=1,
    ...               edges=[(1, 2, 1), (2, 3, 1), (3, 4, 1)])
    >>> build_metric(net).d(1, 4)
    3

    """
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import connected_components, shortest_path

    n = len(network.nodes)
    index = {v: i for i, v in enumerate(network.nodes)}
    rows = [index[u] for u, _, _ in network.edges]
    cols = [index[v] for _, v, _ in network.edges]
    data = np.array([length for _, _, length in network.edges], dtype=float)
    graph = csr_matrix((data, (rows, cols)), shape=(n, n))

    ncomp, _ = connected_components(graph, directed=False)
    if ncomp > 1:
        raise GraphNotConnected("The network consists of {:d} disconnected "
                                "components.".format(ncomp))

    dist = np.rint(shortest_path(graph, method='D', directed=False))
    dist = dist.astype(np.int64)
    dist.setflags(write=False)
    return MetricClosure(nodes=network.nodes, dist=dist)


@dataclass(frozen=True)
class Subnetwork:
    """
    A circuit (fixed-direction cycle) or a line (path travelled both ways)
    laid over the network.

    ``edge_lengths[i]`` is the length of the edge from ``stations[i]`` to
    ``stations[i + 1]``; circuits carry one more entry for the closing edge
    from the last station back to the first one. Use
    :py:meth:`Subnetwork.from_network` to look the lengths up.

    """
    id: int
    kind: SubnetworkKind
    stations: tuple
    origin_index: int = 0
    edge_lengths: tuple = ()

    def __post_init__(self):
        kind = SubnetworkKind.parse(self.kind)
        stations = tuple(int(s) for s in self.stations)
        lengths = tuple(int(x) for x in self.edge_lengths)

        if len(stations) < 2:
            raise InstanceError("Subnetwork {} needs at least two "
                                "stations.".format(self.id))
        if len(set(stations)) != len(stations):
            raise InstanceError("Stations of subnetwork {} must be "
                                "distinct.".format(self.id))
        nedges = len(stations) if kind is SubnetworkKind.CIRCUIT else \
            len(stations) - 1
        if len(lengths) != nedges:
            raise InstanceError("Subnetwork {} needs {:d} edge lengths, got "
                                "{:d}.".format(self.id, nedges, len(lengths)))
        if any(x < 1 for x in lengths):
            raise InstanceError("Edge lengths of subnetwork {} must be "
                                "positive.".format(self.id))
        if not 0 <= self.origin_index < len(stations):
            raise InstanceError("Origin index of subnetwork {} is out of "
                                "range.".format(self.id))
        if (kind is SubnetworkKind.LINE and
                self.origin_index not in (0, len(stations) - 1)):
            raise InstanceError("The origin of line {} must be one of its "
                                "ends.".format(self.id))

        object.__setattr__(self, 'id', int(self.id))
        object.__setattr__(self, 'kind', kind)
        object.__setattr__(self, 'stations', stations)
        object.__setattr__(self, 'origin_index', int(self.origin_index))
        object.__setattr__(self, 'edge_lengths', lengths)

    @classmethod
    def from_network(cls, network, id, kind, stations, origin=None):
        """ Build a subnetwork whose edge lengths are taken from
        ``network``; ``origin`` is a station (default: the first one). """
        kind = SubnetworkKind.parse(kind)
        stations = [int(s) for s in stations]
        pairs = list(zip(stations[:-1], stations[1:]))
        if kind is SubnetworkKind.CIRCUIT:
            pairs.append((stations[-1], stations[0]))
        lengths = []
        for u, v in pairs:
            if not network.has_edge(u, v):
                raise InstanceError("Subnetwork {}: ({}, {}) is not an edge "
                                    "of the network.".format(id, u, v))
            lengths.append(network.edge_length(u, v))
        if origin is None:
            origin_index = 0
        elif origin in stations:
            origin_index = stations.index(origin)
        else:
            raise NotOnSubnetwork("Origin {} is not a station of subnetwork "
                                  "{}.".format(origin, id))
        return cls(id=id, kind=kind, stations=tuple(stations),
                   origin_index=origin_index, edge_lengths=tuple(lengths))

    @property
    def is_circuit(self):
        return self.kind is SubnetworkKind.CIRCUIT

    @property
    def origin(self):
        return self.stations[self.origin_index]

    @property
    def length(self):
        return sum(self.edge_lengths)

    @functools.cached_property
    def _index(self):
        return {s: i for i, s in enumerate(self.stations)}

    @functools.cached_property
    def _prefix(self):
        return tuple(itertools.accumulate((0,) + self.edge_lengths))

    def contains(self, station):
        return station in self._index

    def index(self, station):
        try:
            return self._index[station]
        except KeyError:
            raise NotOnSubnetwork("Station {} is not on subnetwork "
                                  "{}.".format(station, self.id)) from None

    def travel(self, u, v):
        """ Driving distance from ``u`` to ``v`` respecting the direction
        rules (forward only on a circuit). """
        i, j = self.index(u), self.index(v)
        if self.is_circuit:
            return (self._prefix[j] - self._prefix[i]) % self.length
        return abs(self._prefix[j] - self._prefix[i])

    def offset(self, station):
        """ Distance from the origin to ``station`` along the subnetwork. """
        return self.travel(self.origin, station)

    def successor(self, station):
        """ The station following ``station`` on a circuit. """
        i = self.index(station)
        return self.stations[(i + 1) % len(self.stations)]

    def next_toward(self, u, target):
        """ The neighbour of ``u`` a vehicle drives to on its way to
        ``target``. """
        if u == target:
            raise NotOnSubnetwork("Vehicle is already at station "
                                  "{}.".format(u))
        if self.is_circuit:
            self.index(target)
            return self.successor(u)
        i, j = self.index(u), self.index(target)
        return self.stations[i + 1 if j > i else i - 1]

    def step_length(self, u, v):
        """ Length of the edge ``u -> v`` or `None` when the subnetwork
        does not permit driving directly from ``u`` to ``v``. """
        i, j = self._index.get(u), self._index.get(v)
        if i is None or j is None:
            return None
        n = len(self.stations)
        if self.is_circuit:
            return self.edge_lengths[i] if j == (i + 1) % n else None
        if abs(i - j) != 1:
            return None
        return self.edge_lengths[min(i, j)]

    def path(self, u, v):
        """ Station list driven from ``u`` to ``v`` (both included). """
        route = [u]
        while route[-1] != v:
            route.append(self.next_toward(route[-1], v))
        return route


def circuit_distance(sub, u, v):
    """
    Directed travel cost between two stations of a circuit.

    Parameters
    ----------
    sub : Subnetwork
        A circuit.

    u, v : int
        Stations of ``sub``.

    Returns
    -------
    ticks : int
        Sum of edge lengths driven from ``u`` to ``v`` in the circuit's
        fixed direction (0 when ``u == v``).

    Examples
    --------
    >>> from shuttlesim.core import Subnetwork, circuit_distance
    >>> c = Subnetwork(id=0, kind='circuit', stations=(1, 2, 3, 4),
    ...                edge_lengths=(1, 1, 1, 1))
    >>> circuit_distance(c, 1, 2), circuit_distance(c, 2, 1)
    (1, 3)

    """
    if not sub.is_circuit:
        raise InstanceError("circuit_distance() requires a circuit, "
                            "subnetwork {} is a line.".format(sub.id))
    return sub.travel(u, v)


@dataclass(frozen=True)
class Request:
    """
    A customer request ``(t, x, y, p, q, z)``; fields not known for the
    request's kind are `None`.

    ``link`` ties a pickup request (simple call-box at the origin) to the
    delivery request its passenger issues once aboard, and back.

    """
    id: int
    kind: RequestKind
    t: int
    x: int = None
    y: int = None
    p: int = None
    q: int = None
    z: int = 1
    link: int = None

    def __post_init__(self):
        kind = RequestKind.parse(self.kind)
        object.__setattr__(self, 'kind', kind)
        for name in ('id', 't', 'x', 'y', 'p', 'q', 'z', 'link'):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, int(value))

        def fail(msg):
            raise InstanceError("Request {}: {:s}".format(self.id, msg))

        if self.t < 0:
            fail("release tick must be non-negative.")
        if self.z < 1:
            fail("passenger count must be at least one.")

        if kind is RequestKind.PICKUP:
            if self.x is None or self.y is not None:
                fail("a pickup request has an origin and no destination.")
        elif kind is RequestKind.DELIVERY:
            if self.y is None or self.x is not None:
                fail("a delivery request has a destination and no origin.")
        else:
            if self.x is None or self.y is None:
                fail("origin and destination are required.")
            if self.x == self.y:
                fail("origin and destination must differ.")
            if self.link is not None:
                fail("only pickup and delivery requests can be linked.")

        if kind in (RequestKind.PICKUP, RequestKind.DELIVERY) and self.z != 1:
            fail("pickup and delivery requests carry exactly one passenger.")

        if kind is RequestKind.FULL:
            if self.p is None or self.q is None:
                fail("a full request needs its time window (p, q).")
            if self.p < 0 or self.q < self.p:
                fail("time window [p, q] is empty.")
        elif self.p is not None or self.q is not None:
            fail("only full requests carry a time window.")


@dataclass(frozen=True)
class Task:
    """ Operator task created from a request and sent to a subnetwork. """
    id: int
    kind: TaskKind
    source_request: int
    subnetwork: int
    t: int
    x: int = None
    y: int = None
    z: int = 1
    pick: int = None
    drop: int = None


def covering_subnetworks(request, subnetworks):
    """ Subnetworks containing every known station of ``request``. """
    stations = [s for s in (request.x, request.y) if s is not None]
    return [sub for sub in subnetworks
            if all(sub.contains(s) for s in stations)]


def make_task(request, subnetworks, metric=None):
    """
    Create the operator task serving ``request``.

    Parameters
    ----------
    request : Request
        The request to serve.

    subnetworks : iterable of Subnetwork
        Candidate subnetworks; the first one containing all known stations
        of the request is chosen.

    metric : MetricClosure, None, optional
        Needed for full requests, whose pickup and drop ticks depend on
        ``d(x, y)``.

    Returns
    -------
    task : Task
        For full requests ``pick = max(p, t)`` and ``drop = pick + d(x, y)``.

    Raises
    ------
    NoCoveringSubnetwork
        When no subnetwork contains the request's stations.

    InfeasibleWindow
        When a full request cannot be delivered by ``q``.

    """
    candidates = covering_subnetworks(request, subnetworks)
    if not candidates:
        raise NoCoveringSubnetwork("No subnetwork covers the stations of "
                                   "request {}.".format(request.id))
    sub = candidates[0]
    pick = drop = None
    if request.kind is RequestKind.FULL:
        if metric is None:
            raise BadParams("A metric closure is required to plan full "
                            "request {}.".format(request.id))
        dxy = metric.d(request.x, request.y)
        pick = max(request.p, request.t)
        drop = pick + dxy
        if drop > request.q:
            raise InfeasibleWindow(
                "Request {}: earliest delivery at tick {:d} misses the "
                "deadline {:d}.".format(request.id, drop, request.q))
    return Task(id=request.id, kind=_TASK_OF_REQUEST[request.kind],
                source_request=request.id, subnetwork=sub.id, t=request.t,
                x=request.x, y=request.y, z=request.z, pick=pick, drop=drop)


@dataclass(frozen=True)
class FleetConfig:
    """ ``k`` unit-speed vehicles of capacity ``cap``; ``assignment[j]`` is
    the subnetwork id vehicle ``j`` operates on. """
    k: int = 1
    cap: int = 1
    assignment: tuple = ()

    speed = 1

    def __post_init__(self):
        if int(self.k) < 1:
            raise InstanceError("The fleet needs at least one vehicle.")
        if int(self.cap) < 1:
            raise InstanceError("Vehicle capacity must be at least one.")
        object.__setattr__(self, 'k', int(self.k))
        object.__setattr__(self, 'cap', int(self.cap))
        assignment = tuple(int(a) for a in self.assignment)
        if assignment and len(assignment) != self.k:
            raise InstanceError("Fleet assignment must name one subnetwork "
                                "per vehicle.")
        object.__setattr__(self, 'assignment', assignment)


@dataclass(frozen=True)
class Ride:
    """
    One passenger group to carry, as seen by a clairvoyant observer.

    ``id`` is the id of the request that releases the ride (a pickup
    request for simple call-boxes). ``delivery_id`` is the request that
    names the destination, ``reveal`` the earliest tick at which the
    destination is known.

    """
    id: int
    kind: RequestKind
    release: int
    origin: int
    destination: int
    load: int
    earliest: int = None
    deadline: int = None
    latest_pick: int = None
    delivery_id: int = None
    reveal: int = 0

    @property
    def ready(self):
        """ Earliest tick the ride may be picked up. """
        return self.release if self.earliest is None else \
            max(self.release, self.earliest)


@dataclass(frozen=True)
class Instance:
    """
    Everything an experiment needs: network, subnetworks, fleet, the
    request sequence (sorted by release tick, then id), a scenario tag and
    the objective to evaluate.

    """
    network: Network
    subnetworks: tuple
    fleet: FleetConfig
    requests: tuple = ()
    scenario: Scenario = Scenario.OTHER
    objective: Objective = Objective.TOTAL_TOUR_LENGTH
    name: str = ''

    def __post_init__(self):
        object.__setattr__(self, 'scenario', Scenario.parse(self.scenario))
        object.__setattr__(self, 'objective',
                           Objective.parse(self.objective))
        subs = tuple(self.subnetworks)
        requests = tuple(sorted(self.requests, key=lambda r: (r.t, r.id)))
        object.__setattr__(self, 'subnetworks', subs)
        object.__setattr__(self, 'requests', requests)

        if not subs:
            raise InstanceError("An instance needs at least one subnetwork.")
        if len({s.id for s in subs}) != len(subs):
            raise InstanceError("Subnetwork ids must be unique.")
        for sub in subs:
            self._check_subnetwork(sub)

        if not self.fleet.assignment:
            assignment = tuple(subs[j % len(subs)].id
                               for j in range(self.fleet.k))
            object.__setattr__(self, 'fleet', FleetConfig(
                k=self.fleet.k, cap=self.fleet.cap, assignment=assignment))
        for j, sid in enumerate(self.fleet.assignment):
            sub = self.subnetwork(sid)
            if not sub.contains(self.network.depot):
                raise InstanceError("Vehicle {:d} operates on subnetwork {} "
                                    "which does not contain the depot."
                                    .format(j, sid))

        if len({r.id for r in requests}) != len(requests):
            raise InstanceError("Request ids must be unique.")
        nodes = set(self.network.nodes)
        for r in requests:
            for s in (r.x, r.y):
                if s is not None and s not in nodes:
                    raise InstanceError("Request {} references unknown "
                                        "station {}.".format(r.id, s))
            if r.z > self.fleet.cap:
                raise InstanceError("Request {} carries {:d} passengers, "
                                    "more than the vehicle capacity."
                                    .format(r.id, r.z))
        self._check_links()
        for r in requests:
            if r.kind in (RequestKind.PDP, RequestKind.FULL):
                self._check_covered(r.id, r.x, r.y)
            if r.kind is RequestKind.FULL:
                if r.q < r.p + self.metric.d(r.x, r.y):
                    raise InfeasibleWindow("Request {}: window [{:d}, {:d}] "
                                           "is shorter than the ride."
                                           .format(r.id, r.p, r.q))

    def _check_subnetwork(self, sub):
        net = self.network
        pairs = list(zip(sub.stations[:-1], sub.stations[1:]))
        if sub.is_circuit:
            pairs.append((sub.stations[-1], sub.stations[0]))
        for (u, v), length in zip(pairs, sub.edge_lengths):
            if not net.has_edge(u, v) or net.edge_length(u, v) != length:
                raise InstanceError("Subnetwork {}: ({}, {}) is not a network "
                                    "edge of length {:d}."
                                    .format(sub.id, u, v, length))

    def _check_links(self):
        by_id = {r.id: r for r in self.requests}
        for r in self.requests:
            if r.kind not in (RequestKind.PICKUP, RequestKind.DELIVERY):
                continue
            other = by_id.get(r.link)
            expected = RequestKind.DELIVERY if r.kind is RequestKind.PICKUP \
                else RequestKind.PICKUP
            if other is None or other.kind is not expected or \
                    other.link != r.id:
                raise InstanceError("Request {} must be linked to a {:s} "
                                    "request linking back to it."
                                    .format(r.id, expected.value))
            if r.kind is RequestKind.PICKUP:
                if r.x == other.y:
                    raise InstanceError("Requests {} and {} start and end at "
                                        "the same station."
                                        .format(r.id, other.id))
                self._check_covered(r.id, r.x, other.y)

    def _check_covered(self, rid, x, y):
        if not any(s.contains(x) and s.contains(y) for s in self.subnetworks):
            raise NoCoveringSubnetwork("Stations {} and {} of request {} do "
                                       "not lie in a common subnetwork."
                                       .format(x, y, rid))

    @functools.cached_property
    def metric(self):
        return build_metric(self.network)

    @functools.cached_property
    def _subnetwork_map(self):
        return {s.id: s for s in self.subnetworks}

    @functools.cached_property
    def _request_map(self):
        return {r.id: r for r in self.requests}

    def subnetwork(self, sid):
        try:
            return self._subnetwork_map[sid]
        except KeyError:
            raise InstanceError("Unknown subnetwork {}.".format(sid)) from None

    def request(self, rid):
        return self._request_map[rid]

    def vehicle_subnetwork(self, vehicle):
        return self.subnetwork(self.fleet.assignment[vehicle])

    @property
    def cap(self):
        return self.fleet.cap

    @property
    def depot(self):
        return self.network.depot

    @functools.cached_property
    def rides(self):
        """ Rides in release order; linked delivery requests are folded
        into the ride of their pickup request. """
        rides = []
        for r in self.requests:
            if r.kind is RequestKind.DELIVERY:
                continue
            if r.kind is RequestKind.PICKUP:
                d = self.request(r.link)
                rides.append(Ride(id=r.id, kind=r.kind, release=r.t,
                                  origin=r.x, destination=d.y, load=r.z,
                                  delivery_id=d.id, reveal=d.t))
                continue
            latest = None
            if r.kind is RequestKind.FULL:
                latest = r.q - self.metric.d(r.x, r.y)
            rides.append(Ride(id=r.id, kind=r.kind, release=r.t, origin=r.x,
                              destination=r.y, load=r.z, earliest=r.p,
                              deadline=r.q, latest_pick=latest,
                              delivery_id=r.id, reveal=r.t))
        return tuple(rides)

    @functools.cached_property
    def ride_map(self):
        return {ride.id: ride for ride in self.rides}

    def tasks(self):
        """ Operator tasks for all requests, in release order. """
        return [make_task(r, self.subnetworks, self.metric)
                for r in self.requests]

    def replace(self, **changes):
        """ Copy of this instance with some fields replaced. """
        fields = dict(network=self.network, subnetworks=self.subnetworks,
                      fleet=self.fleet, requests=self.requests,
                      scenario=self.scenario, objective=self.objective,
                      name=self.name)
        fields.update(changes)
        return Instance(**fields)


def validate_partition(network, subnetworks, scenario):
    """
    Check a supplied subnetwork design against the covering rules of a
    scenario.

    Parameters
    ----------
    network : Network
        The station network; station roles come from its labels.

    subnetworks : iterable of Subnetwork
        The proposed design.

    scenario : Scenario, str
        ``'morning'``, ``'evening'``, ``'lunch'``, ``'emergency'`` or
        ``'other'``.

    Returns
    -------
    violations : list of str
        Empty when the design satisfies every rule of the scenario.

    Raises
    ------
    LabelError
        When a station carries a label other than ``'parking'``,
        ``'building'`` or ``'restaurant'``.

    """
    scenario = Scenario.parse(scenario)
    for station, label in network.labels:
        if label not in STATION_LABELS:
            raise LabelError("Station {} has unknown label '{:s}'."
                             .format(station, label))

    subnetworks = list(subnetworks)
    violations = []
    known = set(network.nodes)
    for sub in subnetworks:
        unknown = [s for s in sub.stations if s not in known]
        if unknown:
            violations.append("subnetwork {} has unknown stations {}"
                              .format(sub.id, unknown))

    covered = set()
    for sub in subnetworks:
        covered.update(sub.stations)
    parkings = network.stations_labeled('parking')
    buildings = network.stations_labeled('building')
    restaurants = network.stations_labeled('restaurant')

    if scenario in (Scenario.MORNING, Scenario.EVENING):
        for s in parkings + buildings:
            if s not in covered:
                violations.append("{:s} {} is not covered"
                                  .format(network.label(s), s))
        metric = build_metric(network) if parkings else None
        for sub in subnetworks:
            own = [s for s in sub.stations if s in parkings]
            if len(own) != 1:
                violations.append("subnetwork {} contains {:d} parkings "
                                  "instead of one".format(sub.id, len(own)))
                continue
            for b in sub.stations:
                if b not in buildings:
                    continue
                nearest = min(metric.d(b, p) for p in parkings)
                if metric.d(b, own[0]) > nearest:
                    violations.append(
                        "building {} in subnetwork {} is nearer to a parking "
                        "of another subnetwork than to {}"
                        .format(b, sub.id, own[0]))

    elif scenario is Scenario.LUNCH:
        if len(restaurants) != 1:
            violations.append("lunch needs exactly one restaurant station, "
                              "found {:d}".format(len(restaurants)))
        for sub in subnetworks:
            if sub.is_circuit:
                violations.append("subnetwork {} is not a line"
                                  .format(sub.id))
            for r in restaurants:
                if not sub.contains(r):
                    violations.append("line {} misses restaurant {}"
                                      .format(sub.id, r))
        for b in buildings:
            if b not in covered:
                violations.append("building {} is not covered".format(b))

    elif scenario is Scenario.EMERGENCY:
        if len(subnetworks) != 1:
            violations.append("emergency needs one circuit, found {:d} "
                              "subnetworks".format(len(subnetworks)))
        else:
            sub = subnetworks[0]
            if not sub.is_circuit:
                violations.append("subnetwork {} is not a circuit"
                                  .format(sub.id))
            missing = sorted(known - set(sub.stations))
            if missing:
                violations.append("circuit {} misses stations {}"
                                  .format(sub.id, missing))

    else:
        missing = sorted(known - covered)
        if missing:
            violations.append("stations {} are not covered".format(missing))
        for a, b in itertools.combinations(subnetworks, 2):
            if not set(a.stations) & set(b.stations):
                violations.append("subnetworks {} and {} do not intersect"
                                  .format(a.id, b.id))

    return violations
