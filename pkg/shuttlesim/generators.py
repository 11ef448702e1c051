"""
Instance generators: the adversarial request sequences that bound the
competitive ratios of the online policies from below, and seeded random
instances of the morning, evening, lunch and off-peak traffic scenarios.

:License: :doc:`../LICENSE`

"""
import inspect
import logging
from dataclasses import dataclass

import numpy as np

from .core import (Network, Subnetwork, Request, FleetConfig, Instance,
                   Scenario, Objective, SubnetworkKind, RequestKind)
from .exceptions import BadParams, UnknownGenerator


__all__ = ['GeneratorSpec', 'EXAMPLES', 'gen_example', 'gen_scenario',
           'circuit_network', 'line_network', 'HORIZON_FACTOR',
           'SCENARIO_DEFAULTS', 'SUPPORTED_LAYOUTS']

HORIZON_FACTOR = 10
SUPPORTED_LAYOUTS = ('circuit', 'line')
SCENARIO_DEFAULTS = {'n': 5, 'requests': 6, 'cap': 2, 'max_edge': 1,
                     'layout': 'circuit', 'k': 1}

log = logging.getLogger(__name__)


def circuit_network(stations, lengths, labels=()):
    """ Network consisting of a single cycle through ``stations`` and the
    circuit running along it with the first station as origin and depot.

    ``lengths[i]`` is the length of the edge leaving ``stations[i]``.

    """
    n = len(stations)
    edges = [(stations[i], stations[(i + 1) % n], lengths[i])
             for i in range(n)]
    net = Network(nodes=stations, edges=edges, depot=stations[0],
                  labels=labels)
    sub = Subnetwork.from_network(net, 0, SubnetworkKind.CIRCUIT, stations)
    return net, sub


def line_network(stations, lengths, labels=()):
    """ Network consisting of a path through ``stations`` and the line
    running along it with the first station as origin and depot. """
    edges = [(u, v, length) for u, v, length in
             zip(stations[:-1], stations[1:], lengths)]
    net = Network(nodes=stations, edges=edges, depot=stations[0],
                  labels=labels)
    sub = Subnetwork.from_network(net, 0, SubnetworkKind.LINE, stations)
    return net, sub


def _parking_labels(stations):
    return [(stations[0], 'parking')] + [(s, 'building')
                                         for s in stations[1:]]


def _check(**limits):
    for name, (value, low) in limits.items():
        if int(value) != value or value < low:
            raise BadParams("Parameter '{:s}' must be an integer of at least "
                            "{:d}, got {}.".format(name, low, value))


def _instance(net, sub, cap, requests, scenario, objective, name):
    return Instance(network=net, subnetworks=(sub,),
                    fleet=FleetConfig(k=1, cap=cap), requests=requests,
                    scenario=scenario, objective=objective, name=name)


def ex1_sir_length(n=4, cap=3, scale=1, requests=None):
    """ ``Cap`` requests for every hop ``v_g -> v_g+1`` of a circuit, one
    released per round; SIR drives a full round for each of them. With
    ``requests`` only that many leading requests are kept. """
    _check(n=(n, 2), cap=(cap, 1), scale=(scale, 1))
    stations = list(range(1, n + 1))
    net, sub = circuit_network(stations, [scale] * n,
                               _parking_labels(stations))
    hops = [(stations[g], stations[(g + 1) % n]) for g in range(n)]
    pairs = [hop for hop in hops for _ in range(cap)]
    if requests is not None:
        _check(requests=(requests, 0))
        if requests > len(pairs):
            raise BadParams("ex1_sir_length has at most {:d} requests."
                            .format(len(pairs)))
        pairs = pairs[:requests]
    reqs = [Request(id=i, kind=RequestKind.PDP, t=(i - 1) * sub.length,
                    x=x, y=y) for i, (x, y) in enumerate(pairs, start=1)]
    morning = all(x == stations[0] for x, _ in pairs)
    scenario = Scenario.MORNING if morning else Scenario.OTHER
    return _instance(net, sub, cap, reqs, scenario,
                     Objective.TOTAL_TOUR_LENGTH, 'ex1_sir_length')


def ex2_sir_makespan(n=4, scale=2, cap=2):
    """ Two passengers from the origin to the last station, released one
    tick apart: SIR leaves with the first one and has to come back for the
    second. """
    _check(n=(n, 2), scale=(scale, 1), cap=(cap, 2))
    stations = list(range(1, n + 1))
    net, sub = circuit_network(stations, [scale] * n,
                               _parking_labels(stations))
    reqs = [Request(id=1, kind=RequestKind.PDP, t=0, x=1, y=n),
            Request(id=2, kind=RequestKind.PDP, t=1, x=1, y=n)]
    return _instance(net, sub, cap, reqs, Scenario.MORNING,
                     Objective.MAKESPAN, 'ex2_sir_makespan')


def ex3_sife_makespan(n=5, cap=2, scale=1):
    """ A full load released at the last station just before the vehicle
    could have been there. """
    _check(n=(n, 2), cap=(cap, 1), scale=(scale, 1))
    stations = list(range(1, n + 1))
    net, sub = circuit_network(stations, [scale] * n,
                               _parking_labels(stations))
    reqs = [Request(id=1, kind=RequestKind.PDP, t=(n - 1) * scale, x=n, y=1,
                    z=cap)]
    return _instance(net, sub, cap, reqs, Scenario.EVENING,
                     Objective.MAKESPAN, 'ex3_sife_makespan')


def ex4_sifm_makespan(n=4, cap=3, scale=1):
    """ One passenger at tick 0, then ``Cap`` more after one round, the
    last of which no longer fits. """
    _check(n=(n, 2), cap=(cap, 2), scale=(scale, 1))
    stations = list(range(1, n + 1))
    net, sub = circuit_network(stations, [scale] * n,
                               _parking_labels(stations))
    c = sub.length
    reqs = [Request(id=1, kind=RequestKind.PDP, t=0, x=1, y=n, z=1),
            Request(id=2, kind=RequestKind.PDP, t=c, x=1, y=n, z=cap - 1),
            Request(id=3, kind=RequestKind.PDP, t=c, x=1, y=n, z=1)]
    return _instance(net, sub, cap, reqs, Scenario.MORNING,
                     Objective.MAKESPAN, 'ex4_sifm_makespan')


def ex5_main_makespan(n=4, scale=2, cap=2):
    """ Two passengers from the origin ``v_0`` to the far end ``v_n`` of a
    line, released one tick apart. """
    _check(n=(n, 1), scale=(scale, 1), cap=(cap, 2))
    stations = list(range(0, n + 1))
    net, sub = line_network(stations, [scale] * n, _parking_labels(stations))
    reqs = [Request(id=1, kind=RequestKind.PDP, t=0, x=0, y=n),
            Request(id=2, kind=RequestKind.PDP, t=1, x=0, y=n)]
    return _instance(net, sub, cap, reqs, Scenario.MORNING,
                     Objective.MAKESPAN, 'ex5_main_makespan')


def main_length_lb(n=4, cap=2, scale=1):
    """
    ``Cap`` requests ``v_1 -> v_i`` for ``i = 2 ... n`` on the line
    ``(v_1, ..., v_n)``. Each request is released when MAIN delivers the
    previous one, so MAIN serves every request with its own trip.

    """
    _check(n=(n, 2), cap=(cap, 1), scale=(scale, 1))
    stations = list(range(1, n + 1))
    net, sub = line_network(stations, [scale] * (n - 1),
                            _parking_labels(stations))
    targets = [y for y in stations[1:] for _ in range(cap)]
    reqs = []
    delivered = 0
    for i, y in enumerate(targets):
        release = delivered
        if i == 0:
            delivered = sub.offset(y)
        else:
            # back to the origin, then out to the new destination
            delivered = release + sub.offset(targets[i - 1]) + sub.offset(y)
        reqs.append(Request(id=i + 1, kind=RequestKind.PDP, t=release,
                            x=stations[0], y=y))
    return _instance(net, sub, cap, reqs, Scenario.MORNING,
                     Objective.TOTAL_TOUR_LENGTH, 'main_length_lb')


@dataclass(frozen=True)
class GeneratorSpec:
    """
    A named adversarial instance family with the policy and objective it
    targets and the closed-form costs of the policy and of the optimum.

    """
    name: str
    build: object
    policy: str
    objective: Objective
    expected: object

    def defaults(self):
        sig = inspect.signature(self.build)
        return {k: p.default for k, p in sig.parameters.items()}

    def costs(self, **params):
        """ ``(policy cost, optimal cost)`` for the given parameters. """
        args = self.defaults()
        args.update(params)
        return self.expected(**args)


def _ex1_costs(n, cap, scale, requests):
    c = n * scale
    m = n * cap if requests is None else requests
    return m * c, c if m else 0


EXAMPLES = {
    spec.name: spec for spec in (
        GeneratorSpec('ex1_sir_length', ex1_sir_length, 'sir',
                      Objective.TOTAL_TOUR_LENGTH, _ex1_costs),
        GeneratorSpec('ex2_sir_makespan', ex2_sir_makespan, 'sir',
                      Objective.MAKESPAN,
                      lambda n, scale, cap: (2 * n * scale, n * scale + 1)),
        GeneratorSpec('ex3_sife_makespan', ex3_sife_makespan, 'sif_e',
                      Objective.MAKESPAN,
                      lambda n, cap, scale: ((2 * n - 1) * scale, n * scale)),
        GeneratorSpec('ex4_sifm_makespan', ex4_sifm_makespan, 'sif_m',
                      Objective.MAKESPAN,
                      lambda n, cap, scale: (3 * n * scale, 2 * n * scale)),
        GeneratorSpec('ex5_main_makespan', ex5_main_makespan, 'main',
                      Objective.MAKESPAN,
                      lambda n, scale, cap: (4 * n * scale,
                                             2 * n * scale + 1)),
        GeneratorSpec('main_length_lb', main_length_lb, 'main',
                      Objective.TOTAL_TOUR_LENGTH,
                      lambda n, cap, scale: (n * (n - 1) * cap * scale,
                                             n * (n - 1) * scale)),
    )
}


def gen_example(name, params=None, **kwargs):
    """
    Build one of the adversarial example instances.

    Parameters
    ----------
    name : str
        One of ``'ex1_sir_length'``, ``'ex2_sir_makespan'``,
        ``'ex3_sife_makespan'``, ``'ex4_sifm_makespan'``,
        ``'ex5_main_makespan'`` or ``'main_length_lb'``.

    params : dict, None, optional
        Generator parameters (``n``, ``cap``, ``scale`` and, for
        ``ex1_sir_length``, ``requests``). Keyword arguments are merged
        into ``params``.

    Returns
    -------
    instance : Instance
        Depot and subnetwork origin coincide.

    Raises
    ------
    UnknownGenerator
        When ``name`` is not a known example.

    BadParams
        When a parameter is unknown or out of range.

    Examples
    --------
    >>> inst = gen_example('ex3_sife_makespan', n=5, cap=2)
    >>> [(r.t, r.x, r.y, r.z) for r in inst.requests]
    [(4, 5, 1, 2)]

    """
    try:
        spec = EXAMPLES[name]
    except KeyError:
        raise UnknownGenerator("Unknown example '{}'. Known examples: {:s}."
                               .format(name, ', '.join(EXAMPLES))) from None
    args = dict(params or {})
    args.update(kwargs)
    unknown = set(args) - set(spec.defaults())
    if unknown:
        raise BadParams("Unknown parameters {} for example '{:s}'."
                        .format(sorted(unknown), name))
    return spec.build(**args)


def _as_rng(seed):
    return np.random.default_rng(int(seed) % 2**64)


def gen_scenario(scenario, seed, params=None, **kwargs):
    """
    Generate a pseudo-random instance of a traffic scenario.

    Parameters
    ----------
    scenario : Scenario, str
        ``'morning'`` (parking to buildings), ``'evening'`` (buildings to
        parking), ``'lunch'`` (to or from a restaurant in the middle of a
        line) or ``'other'`` (between arbitrary stations of a circuit).

    seed : int
        Seed of the `numpy.random.Generator` all draws come from. The same
        seed and parameters always give the same instance.

    params : dict, None, optional
        ``n`` stations, ``requests`` count, vehicle ``cap``, ``max_edge``
        (edge lengths are drawn from ``1 ... max_edge``), ``layout``
        (``'circuit'`` or ``'line'``, morning and evening only) and
        ``horizon`` (defaults to ten times the subnetwork length).
        Keyword arguments are merged into ``params``.

    Returns
    -------
    instance : Instance
        A single-vehicle instance whose depot is the subnetwork origin.
        Morning and evening instances use the total tour length objective,
        which the caller can change with :py:meth:`Instance.replace`.

    Examples
    --------
    >>> inst = gen_scenario('morning', seed=1, n=5, requests=6, cap=2)
    >>> all(r.x == inst.network.depot for r in inst.requests)
    True

    """
    scenario = Scenario.parse(scenario)
    args = dict(SCENARIO_DEFAULTS)
    args['horizon'] = None
    args.update(params or {})
    args.update(kwargs)
    unknown = set(args) - set(SCENARIO_DEFAULTS) - {'horizon'}
    if unknown:
        raise BadParams("Unknown scenario parameters {}."
                        .format(sorted(unknown)))
    n, m, cap, max_edge = (args['n'], args['requests'], args['cap'],
                           args['max_edge'])
    _check(n=(n, 2), requests=(m, 0), cap=(cap, 1), max_edge=(max_edge, 1),
           k=(args['k'], 1))
    layout = args['layout']
    if layout not in SUPPORTED_LAYOUTS:
        raise BadParams("Unknown layout '{}'. Supported layouts are: {:s}."
                        .format(layout, ', '.join(SUPPORTED_LAYOUTS)))
    if scenario is Scenario.EMERGENCY:
        raise BadParams("Requests are not generated for the emergency "
                        "scenario.")
    if scenario is Scenario.LUNCH:
        if n < 3:
            raise BadParams("A lunch line needs at least three stations.")
        layout = 'line'
    elif scenario is Scenario.OTHER:
        layout = 'circuit'

    rng = _as_rng(seed)
    stations = list(range(1, n + 1))
    nedges = n if layout == 'circuit' else n - 1
    lengths = [int(x) for x in rng.integers(1, max_edge + 1, size=nedges)]

    if scenario is Scenario.LUNCH:
        restaurant = stations[n // 2]
        labels = [(s, 'restaurant' if s == restaurant else 'building')
                  for s in stations]
    else:
        labels = _parking_labels(stations)
    build = circuit_network if layout == 'circuit' else line_network
    net, sub = build(stations, lengths, labels)

    horizon = args['horizon']
    if horizon is None:
        horizon = HORIZON_FACTOR * sub.length
    releases = sorted(int(t) for t in rng.integers(0, horizon + 1, size=m))

    parking = stations[0]
    others = stations[1:]
    reqs = []
    for i, t in enumerate(releases, start=1):
        if scenario is Scenario.MORNING:
            x, y = parking, int(rng.choice(others))
        elif scenario is Scenario.EVENING:
            x, y = int(rng.choice(others)), parking
        elif scenario is Scenario.LUNCH:
            b = int(rng.choice([s for s in stations if s != restaurant]))
            x, y = (b, restaurant) if rng.integers(2) else (restaurant, b)
        else:
            x, y = (int(s) for s in rng.choice(stations, size=2,
                                               replace=False))
        reqs.append(Request(id=i, kind=RequestKind.PDP, t=t, x=x, y=y))

    k = args['k']
    log.debug("%s instance for seed %s: %d stations, %d requests",
              scenario.value, seed, n, m)
    return Instance(network=net, subnetworks=(sub,),
                    fleet=FleetConfig(k=k, cap=cap), requests=reqs,
                    scenario=scenario, objective=Objective.TOTAL_TOUR_LENGTH,
                    name='{:s}-{}'.format(scenario.value, seed))
