"""
Command line front end::

    shuttlesim gen ex1_sir_length n=4 cap=3 -o ex1.json
    shuttlesim gen morning --seed 7 n=5 requests=6 -o morning.json
    shuttlesim validate ex1.json
    shuttlesim simulate ex1.json --policy sir --out schedule.txt
    shuttlesim opt ex1.json --objective length
    shuttlesim ratio ex1.json --policy sir --objective length
    shuttlesim suite --config theorems.cfg --csv report.csv

Exit status is 0 on success, 1 when an instance or a run fails
validation, 2 when a competitive bound is violated and 3 on I/O or parse
errors.

:License: :doc:`../LICENSE`

"""
import argparse
import dataclasses
import logging
import sys

from . import __version__
from .bench import load_suite_config, run_suite, theorem_bound
from .core import Objective, Scenario, validate_partition
from .engine import run_online
from .exceptions import ShuttleError, FormatError, ConfigError
from .generators import EXAMPLES, gen_example, gen_scenario
from .oracle import opt_cost, exact_ratio
from .schedule import evaluate
from .utils import load_instance, dump_instance, format_schedule, \
    format_trace


__all__ = ['main', 'EXIT_OK', 'EXIT_INVALID', 'EXIT_BOUND', 'EXIT_IO']

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_BOUND = 2
EXIT_IO = 3

log = logging.getLogger('shuttlesim')


def _params(items):
    params = {}
    for item in items:
        key, sep, value = item.partition('=')
        if not sep or not key:
            raise FormatError("Parameter '{}' is not of the form key=value."
                              .format(item))
        try:
            params[key] = int(value)
        except ValueError:
            params[key] = value
    return params


def _open_out(path):
    if path is None or path == '-':
        return sys.stdout, False
    return open(path, 'w', newline=''), True


def _write(path, text):
    stream, close = _open_out(path)
    try:
        stream.write(text)
        if not text.endswith('\n'):
            stream.write('\n')
    finally:
        if close:
            stream.close()


def cmd_gen(args):
    params = _params(args.params)
    if args.name in EXAMPLES:
        instance = gen_example(args.name, params)
    else:
        instance = gen_scenario(Scenario.parse(args.name), args.seed, params)
    stream, close = _open_out(args.output)
    try:
        dump_instance(instance, stream)
    finally:
        if close:
            stream.close()
    log.info("wrote %s", args.output or 'instance to stdout')
    return EXIT_OK


def cmd_validate(args):
    instance = load_instance(args.instance)
    violations = []
    if instance.network.labels:
        violations = validate_partition(instance.network,
                                        instance.subnetworks,
                                        instance.scenario)
    for v in violations:
        print(v)
    if violations:
        return EXIT_INVALID
    print("{}: valid ({:d} requests, {:d} subnetworks, {:d} vehicles)"
          .format(args.instance, len(instance.requests),
                  len(instance.subnetworks), instance.fleet.k))
    return EXIT_OK


def cmd_simulate(args):
    instance = load_instance(args.instance)
    schedule, trace = run_online(args.policy, instance)
    _write(args.out, format_schedule(schedule))
    if args.trace is not None:
        _write(args.trace, format_trace(trace))
    objective = instance.objective if args.objective is None else \
        Objective.parse(args.objective)
    if args.out not in (None, '-'):
        print("{:s} {:s}: {:d}".format(args.policy, objective.value,
                                       evaluate(schedule, objective)))
    return EXIT_OK


def cmd_opt(args):
    instance = load_instance(args.instance)
    result = opt_cost(instance, args.objective)
    print("opt {:s}: {:d}".format(result.objective.value, result.cost))
    if args.out is not None:
        _write(args.out, format_schedule(result.schedule))
    return EXIT_OK


def cmd_ratio(args):
    instance = load_instance(args.instance)
    objective = instance.objective if args.objective is None else \
        Objective.parse(args.objective)
    schedule, _ = run_online(args.policy, instance)
    alg = evaluate(schedule, objective)
    opt = opt_cost(instance, objective).cost
    ratio = exact_ratio(alg, opt)
    bound = theorem_bound(args.policy, objective, instance)
    print("{:s} {:s}: alg={:d} opt={:d} ratio={} bound={}".format(
        args.policy, objective.value, alg, opt, ratio,
        '-' if bound is None else bound))
    if bound is not None and ratio > bound:
        return EXIT_BOUND
    return EXIT_OK


def cmd_suite(args):
    config = load_suite_config(args.config)
    if args.seeds is not None:
        config = dataclasses.replace(config, seeds=args.seeds, jobs=tuple(
            dataclasses.replace(job, seeds=args.seeds) for job in config.jobs
        ))
    report = run_suite(config, workers=args.jobs)

    stream, close = _open_out(args.csv)
    try:
        report.write_csv(stream)
    finally:
        if close:
            stream.close()
    if args.json is not None or config.json:
        path = args.json
        if path is None:
            path = '-' if args.csv in (None, '-') else \
                args.csv.rsplit('.', 1)[0] + '.json'
        stream, close = _open_out(path)
        try:
            report.write_json(stream)
        finally:
            if close:
                stream.close()

    for row in report.violations:
        log.error("bound violated: %s %s %s ratio=%s bound=%s%s",
                  row.instance_id, row.policy, row.objective, row.ratio,
                  row.bound, '' if row.error is None else
                  ' ({})'.format(row.error))
    return EXIT_BOUND if report.violations else EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog='shuttlesim',
        description="Simulate online dispatch policies for autonomous "
                    "shuttles and measure their competitive ratios."
    )
    parser.add_argument('--version', action='version',
                        version='%(prog)s {}'.format(__version__))
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help="more log output (repeatable)")
    parser.add_argument('-q', '--quiet', action='store_true',
                        help="only log errors")
    sub = parser.add_subparsers(dest='command', metavar='command')
    sub.required = True

    p = sub.add_parser('gen', help="generate an instance")
    p.add_argument('name', help="example ({}) or scenario ({})".format(
        ', '.join(EXAMPLES), ', '.join(s.value for s in Scenario)))
    p.add_argument('params', nargs='*', metavar='key=value',
                   help="generator parameters")
    p.add_argument('--seed', type=int, default=0,
                   help="seed of a random scenario (default: 0)")
    p.add_argument('-o', '--output', default=None,
                   help="instance file (default: stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser('validate', help="check an instance file")
    p.add_argument('instance')
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser('simulate', help="run an online policy")
    p.add_argument('instance')
    p.add_argument('--policy', required=True)
    p.add_argument('--objective', default=None)
    p.add_argument('--out', default=None,
                   help="schedule dump (default: stdout)")
    p.add_argument('--trace', default=None, help="trace dump")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser('opt', help="compute the offline optimum")
    p.add_argument('instance')
    p.add_argument('--objective', default=None)
    p.add_argument('--out', default=None, help="witness schedule dump")
    p.set_defaults(func=cmd_opt)

    p = sub.add_parser('ratio', help="competitive ratio on one instance")
    p.add_argument('instance')
    p.add_argument('--policy', required=True)
    p.add_argument('--objective', default=None)
    p.set_defaults(func=cmd_ratio)

    p = sub.add_parser('suite', help="run a benchmark suite")
    p.add_argument('--config', default=None,
                   help="suite configuration (default: bundled theorems)")
    p.add_argument('--csv', default=None, help="report (default: stdout)")
    p.add_argument('--json', default=None, help="JSON copy of the report")
    p.add_argument('--jobs', type=int, default=None,
                   help="worker processes")
    p.add_argument('--seeds', type=int, default=None,
                   help="override the number of seeds of every job")
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None):
    parser = build_parser()
    # Generator parameters may follow options such as --seed.
    args, extra = parser.parse_known_args(argv)
    if extra:
        if args.command != 'gen' or any(a.startswith('-') for a in extra):
            parser.error("unrecognized arguments: {}".format(' '.join(extra)))
        args.params = list(args.params) + extra

    level = logging.ERROR if args.quiet else \
        max(logging.DEBUG, logging.WARNING - 10 * args.verbose)
    logging.basicConfig(level=level,
                        format='%(levelname)s %(name)s: %(message)s')

    try:
        return args.func(args)
    except (OSError, FormatError, ConfigError) as e:
        log.error("%s", e)
        return EXIT_IO
    except ShuttleError as e:
        log.error("%s", e)
        return EXIT_INVALID


if __name__ == '__main__':
    sys.exit(main())
