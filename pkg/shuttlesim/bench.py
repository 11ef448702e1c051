"""
Competitive-ratio experiments: run online policies and the offline oracle
on example and random instances, compare the ratio of their costs with the
proven competitive bounds and report the results as CSV or JSON.

:License: :doc:`../LICENSE`

"""
import configparser
import csv
import json
import logging
import multiprocessing as mp
import os
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import Objective, Scenario
from .engine import run_online, audit_trace
from .exceptions import ConfigError, ShuttleError
from .generators import EXAMPLES, gen_example, gen_scenario
from .oracle import opt_cost, exact_ratio
from .schedule import evaluate


__all__ = ['RatioRow', 'RatioReport', 'SuiteJob', 'SuiteConfig',
           'theorem_bound', 'load_suite_config', 'run_suite',
           'scenario_params', 'REPORT_COLUMNS', 'DEFAULT_SEEDS',
           'DEFAULT_LIMITS', 'DEFAULT_SUITE']

REPORT_COLUMNS = ('instance_id', 'generator', 'seed', 'policy', 'objective',
                  'alg_cost', 'opt_cost', 'ratio_num', 'ratio_den',
                  'bound_num', 'bound_den', 'satisfied')

DEFAULT_SEEDS = 200
DEFAULT_LIMITS = {'max_stations': 6, 'max_requests': 8, 'max_cap': 3,
                  'max_edge': 2}
DEFAULT_SUITE = os.path.join(os.path.dirname(os.path.abspath(__file__)),
                             'data', 'theorems.cfg')

log = logging.getLogger(__name__)


def theorem_bound(policy, objective, instance):
    """
    Proven upper bound on the competitive ratio of ``policy`` for
    ``instance``, or `None` when no bound applies.

    =======  ==========  ===========================  ==================
    policy   objective   instances                    bound
    =======  ==========  ===========================  ==================
    sir      length      morning on a circuit         ``Cap``
    sir      length      any circuit                  ``Cap * |C|``
    sif_m    length      morning on a circuit         1
    sif_e    length      evening on a circuit         1
    main     makespan    morning on a line            2
    main     length      morning on a line            ``Cap``
    =======  ==========  ===========================  ==================

    Examples
    --------
    >>> from shuttlesim.generators import gen_example
    >>> theorem_bound('sir', 'length', gen_example('ex1_sir_length'))
    Fraction(12, 1)

    """
    objective = Objective.parse(objective)
    subs = [instance.vehicle_subnetwork(j)
            for j in range(instance.fleet.k)]
    circuits = all(s.is_circuit for s in subs)
    lines = not any(s.is_circuit for s in subs)
    morning = instance.scenario is Scenario.MORNING
    evening = instance.scenario is Scenario.EVENING
    length = objective is Objective.TOTAL_TOUR_LENGTH
    cap = instance.cap

    if policy == 'sir' and length and circuits:
        if morning:
            return Fraction(cap)
        return Fraction(cap * max(s.length for s in subs))
    if policy == 'sif_m' and length and circuits and morning:
        return Fraction(1)
    if policy == 'sif_e' and length and circuits and evening:
        return Fraction(1)
    if policy == 'main' and lines and morning:
        return Fraction(cap) if length else Fraction(2)
    return None


@dataclass
class RatioRow:
    instance_id: str
    generator: str
    seed: int
    policy: str
    objective: str
    alg_cost: int = None
    opt_cost: int = None
    ratio: Fraction = None
    bound: Fraction = None
    satisfied: bool = None
    error: str = None

    def as_record(self):
        def part(value, attr):
            return None if value is None else getattr(value, attr)

        return {
            'instance_id': self.instance_id,
            'generator': self.generator,
            'seed': self.seed,
            'policy': self.policy,
            'objective': self.objective,
            'alg_cost': self.alg_cost,
            'opt_cost': self.opt_cost,
            'ratio_num': part(self.ratio, 'numerator'),
            'ratio_den': part(self.ratio, 'denominator'),
            'bound_num': part(self.bound, 'numerator'),
            'bound_den': part(self.bound, 'denominator'),
            'satisfied': self.satisfied,
        }


@dataclass
class RatioReport:
    rows: list = field(default_factory=list)

    @property
    def violations(self):
        """ Rows whose ratio exceeds the bound (or that failed while a
        bound applies). """
        return [r for r in self.rows if r.satisfied is False]

    @property
    def errors(self):
        return [r for r in self.rows if r.error is not None]

    def write_csv(self, stream):
        writer = csv.DictWriter(stream, fieldnames=REPORT_COLUMNS,
                                lineterminator='\n')
        writer.writeheader()
        for row in self.rows:
            record = row.as_record()
            writer.writerow({k: '' if v is None else
                             (str(v).lower() if isinstance(v, bool) else v)
                             for k, v in record.items()})

    def write_json(self, stream):
        records = []
        for row in self.rows:
            record = row.as_record()
            record['error'] = row.error
            records.append(record)
        json.dump(records, stream, indent=2)
        stream.write('\n')


@dataclass(frozen=True)
class SuiteJob:
    """ One section of a suite configuration: a policy and objective
    evaluated on an example family or on seeded random instances. """
    name: str
    policy: str
    objective: Objective
    generator: str = None
    scenario: Scenario = None
    params: tuple = ()
    seeds: int = DEFAULT_SEEDS


@dataclass(frozen=True)
class SuiteConfig:
    jobs: tuple
    seeds: int = DEFAULT_SEEDS
    workers: int = 1
    json: bool = False


_INT_KEYS = ('n', 'cap', 'scale', 'requests', 'seeds', 'max_stations',
             'max_requests', 'max_cap', 'max_edge', 'k')


def load_suite_config(path=None):
    """
    Read a suite configuration file.

    The ``[suite]`` section sets defaults (``seeds``, ``jobs`` for the
    number of worker processes, ``json``); every other section is one job
    with ``policy``, ``objective`` and either ``generator`` with example
    parameters or ``scenario`` with ``layout`` and the per-seed limits
    ``max_stations``, ``max_requests``, ``max_cap`` and ``max_edge``.

    Parameters
    ----------
    path : str, None, optional
        Configuration file; the bundled theorem suite when `None`.

    Returns
    -------
    config : SuiteConfig

    Raises
    ------
    ConfigError
        When the file cannot be read or a section is incomplete.

    """
    path = DEFAULT_SUITE if path is None else path
    parser = configparser.ConfigParser()
    try:
        with open(path) as f:
            parser.read_file(f)
    except (OSError, configparser.Error) as e:
        raise ConfigError("Cannot read suite configuration '{}': {}"
                          .format(path, e)) from e

    try:
        suite = parser['suite'] if parser.has_section('suite') else {}
        seeds = int(suite.get('seeds', DEFAULT_SEEDS))
        workers = int(suite.get('jobs', 1))
        as_json = parser.getboolean('suite', 'json', fallback=False)
    except ValueError as e:
        raise ConfigError("Invalid [suite] section in '{}': {}"
                          .format(path, e)) from e

    jobs = []
    for name in parser.sections():
        if name == 'suite':
            continue
        jobs.append(_parse_job(name, parser[name], seeds))
    if not jobs:
        raise ConfigError("Suite configuration '{}' defines no jobs."
                          .format(path))
    return SuiteConfig(jobs=tuple(jobs), seeds=seeds, workers=workers,
                       json=as_json)


def _parse_job(name, section, seeds):
    def fail(msg):
        raise ConfigError("Suite job [{:s}]: {:s}".format(name, msg))

    values = dict(section)
    policy = values.pop('policy', None)
    if policy is None:
        fail("'policy' is required.")
    try:
        objective = Objective.parse(values.pop('objective', 'length'))
    except ShuttleError as e:
        fail(str(e))
    generator = values.pop('generator', None)
    scenario = values.pop('scenario', None)
    if (generator is None) == (scenario is None):
        fail("exactly one of 'generator' and 'scenario' is required.")
    if generator is not None and generator not in EXAMPLES:
        fail("unknown generator '{}'.".format(generator))
    if scenario is not None:
        try:
            scenario = Scenario.parse(scenario)
        except ShuttleError as e:
            fail(str(e))

    params = {}
    for key, value in values.items():
        if key in _INT_KEYS:
            try:
                params[key] = int(value)
            except ValueError:
                fail("'{}' must be an integer.".format(key))
        elif key == 'layout':
            params[key] = value.strip()
        else:
            fail("unknown option '{}'.".format(key))
    job_seeds = params.pop('seeds', seeds)
    return SuiteJob(name=name, policy=policy.strip(), objective=objective,
                    generator=generator, scenario=scenario,
                    params=tuple(sorted(params.items())), seeds=job_seeds)


def scenario_params(seed, limits):
    """ Per-seed instance size drawn from ``limits``: ``n`` stations in
    ``[3, max_stations]``, ``requests`` in ``[1, max_requests]`` and
    ``cap`` in ``[1, max_cap]``. """
    rng = np.random.default_rng((int(seed) % 2**64, 1))
    return {
        'n': int(rng.integers(3, limits['max_stations'] + 1)),
        'requests': int(rng.integers(1, limits['max_requests'] + 1)),
        'cap': int(rng.integers(1, limits['max_cap'] + 1)),
        'max_edge': int(limits['max_edge']),
    }


def _units(config):
    """ Group jobs by the instances they run on: ``{key: (builder args,
    [jobs])}``. """
    units = {}
    for job in config.jobs:
        params = dict(job.params)
        if job.generator is not None:
            key = (job.generator, job.params, None)
            units.setdefault(key, []).append(job)
            continue
        layout = params.pop('layout', 'circuit')
        k = params.pop('k', 1)
        limits = dict(DEFAULT_LIMITS)
        limits.update(params)
        frozen = tuple(sorted(limits.items())) + (('layout', layout),
                                                   ('k', k))
        for seed in range(job.seeds):
            key = (job.scenario.value, frozen, seed)
            units.setdefault(key, []).append(job)
    return [(key, jobs) for key, jobs in units.items()]


def _build(key):
    source, params, seed = key
    params = dict(params)
    if seed is None:
        args = ', '.join('{}={}'.format(k, v) for k, v in params.items())
        return '{:s}({:s})'.format(source, args), gen_example(source, params)
    layout = params.pop('layout')
    k = params.pop('k')
    drawn = scenario_params(seed, params)
    drawn.update(layout=layout, k=k)
    instance_id = '{:s}-{:s}-{:04d}'.format(source, layout, seed)
    return instance_id, gen_scenario(source, seed, drawn)


def _evaluate_unit(unit):
    key, jobs = unit
    source, _, seed = key
    rows = []
    try:
        instance_id, instance = _build(key)
    except ShuttleError as e:
        log.warning("cannot build instance %s: %s", key, e)
        return [RatioRow(instance_id=str(key), generator=source, seed=seed,
                         policy=job.policy, objective=job.objective.value,
                         error=str(e), satisfied=False) for job in jobs]

    optima = {}
    for job in jobs:
        row = RatioRow(instance_id=instance_id, generator=source, seed=seed,
                       policy=job.policy, objective=job.objective.value)
        try:
            row.bound = theorem_bound(job.policy, job.objective, instance)
            schedule, trace = run_online(job.policy, instance)
            audit = audit_trace(trace, instance)
            if audit:
                raise ShuttleError("; ".join(audit))
            row.alg_cost = evaluate(schedule, job.objective)
            if job.objective not in optima:
                optima[job.objective] = opt_cost(instance,
                                                 job.objective).cost
            row.opt_cost = optima[job.objective]
            row.ratio = exact_ratio(row.alg_cost, row.opt_cost)
            if row.bound is not None:
                row.satisfied = row.ratio <= row.bound
        except ShuttleError as e:
            log.warning("%s with %s failed: %s", instance_id, job.policy, e)
            row.error = str(e)
            row.satisfied = False if row.bound is not None else None
        rows.append(row)
    return rows


def run_suite(config=None, workers=None):
    """
    Run a benchmark suite.

    Parameters
    ----------
    config : SuiteConfig, str, None, optional
        A configuration, the path of a configuration file, or `None` for
        the bundled theorem suite.

    workers : int, None, optional
        Number of worker processes; overrides the configuration.

    Returns
    -------
    report : RatioReport
        One row per (instance, policy, objective), sorted by instance id,
        policy and objective. Errors are recorded in their row and do not
        stop the suite.

    """
    if config is None or isinstance(config, str):
        config = load_suite_config(config)
    workers = config.workers if workers is None else workers
    units = _units(config)
    log.info("running %d instances with %d worker(s)", len(units), workers)

    rows = []
    if workers > 1:
        with mp.Pool(workers) as pool:
            for part in pool.map(_evaluate_unit, units):
                rows.extend(part)
    else:
        for unit in units:
            rows.extend(_evaluate_unit(unit))

    rows.sort(key=lambda r: (r.instance_id, r.policy, r.objective))
    report = RatioReport(rows=rows)
    log.info("suite finished: %d rows, %d violations, %d errors",
             len(rows), len(report.violations), len(report.errors))
    return report
