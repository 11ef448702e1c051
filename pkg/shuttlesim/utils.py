"""
This module provides the text formats used by the command line front end:
the JSON instance document, the line-oriented trace dump and the schedule
dump.

:License: :doc:`../LICENSE`

"""
import json
import logging

from .core import (Network, Subnetwork, Request, FleetConfig, Instance,
                   SubnetworkKind, RequestKind, Scenario, Objective)
from .engine import Trace, TraceEvent, EVENT_KINDS
from .exceptions import FormatError, BadParams


__all__ = ['instance_to_dict', 'instance_from_dict', 'load_instance',
           'dump_instance', 'format_trace', 'parse_trace', 'format_schedule',
           'TRACE_HEADER', 'SCHEDULE_HEADER']

TRACE_HEADER = '# tick event vehicle station payload'
SCHEDULE_HEADER = '# vehicle kind from to|station depart|time arrive ' \
                  'load|delta requests'

_REQUEST_FIELDS = ('x', 'y', 'p', 'q', 'z', 'link')

log = logging.getLogger(__name__)


def instance_to_dict(instance):
    """ JSON-ready representation of ``instance``. """
    net = instance.network
    labels = dict(net.labels)
    nodes = []
    for v in net.nodes:
        node = {'id': v}
        if v in labels:
            node['label'] = labels[v]
        nodes.append(node)

    requests = []
    for r in instance.requests:
        doc = {'id': r.id, 'kind': r.kind.value, 't': r.t}
        for name in _REQUEST_FIELDS:
            value = getattr(r, name)
            if value is not None:
                doc[name] = value
        requests.append(doc)

    doc = {
        'network': {
            'nodes': nodes,
            'edges': [{'u': u, 'v': v, 'len': length}
                      for u, v, length in net.edges],
            'depot': net.depot,
        },
        'subnetworks': [
            {'id': s.id, 'kind': s.kind.value, 'stations': list(s.stations),
             'origin': s.origin} for s in instance.subnetworks
        ],
        'fleet': {'k': instance.fleet.k, 'cap': instance.fleet.cap,
                  'assignment': list(instance.fleet.assignment)},
        'requests': requests,
        'scenario': instance.scenario.value,
        'objective': instance.objective.value,
    }
    if instance.name:
        doc['name'] = instance.name
    return doc


def _int(value, what):
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormatError("{:s} must be an integer, got {!r}."
                          .format(what, value))
    return value


def _get(doc, key, what):
    try:
        return doc[key]
    except (KeyError, TypeError):
        raise FormatError("{:s} is missing '{:s}'.".format(what, key)) \
            from None


def _object(value, what):
    if not isinstance(value, dict):
        raise FormatError("{:s} must be a JSON object, got {!r}."
                          .format(what, value))
    return value


def _array(value, what):
    if not isinstance(value, list):
        raise FormatError("{:s} must be a JSON array, got {!r}."
                          .format(what, value))
    return value


def _enum(cls, value, what):
    if not isinstance(value, str):
        raise FormatError("{:s} must be a string, got {!r}."
                          .format(what, value))
    try:
        return cls.parse(value)
    except BadParams as e:
        raise FormatError(str(e)) from None


def instance_from_dict(doc):
    """
    Build an `~shuttlesim.core.Instance` from its JSON representation.

    Raises
    ------
    FormatError
        When a key is missing, a field has the wrong JSON type or names
        an unknown kind, scenario or objective.

    InstanceError
        When the document is well formed but describes an invalid
        instance (see :py:class:`~shuttlesim.core.Instance`).

    """
    if not isinstance(doc, dict):
        raise FormatError("An instance document must be a JSON object.")

    net_doc = _object(_get(doc, 'network', 'Instance'), 'Network')
    nodes = []
    labels = []
    for node in _array(_get(net_doc, 'nodes', 'Network'), 'Network nodes'):
        node = _object(node, 'Node')
        v = _int(_get(node, 'id', 'Node'), 'Node id')
        nodes.append(v)
        if 'label' in node:
            labels.append((v, str(node['label'])))
    edges = []
    for e in _array(_get(net_doc, 'edges', 'Network'), 'Network edges'):
        e = _object(e, 'Edge')
        edges.append((_int(_get(e, 'u', 'Edge'), 'Edge end'),
                      _int(_get(e, 'v', 'Edge'), 'Edge end'),
                      _int(_get(e, 'len', 'Edge'), 'Edge length')))
    network = Network(nodes=nodes, edges=edges, labels=labels,
                      depot=_int(_get(net_doc, 'depot', 'Network'), 'Depot'))

    subnetworks = []
    for s in _array(_get(doc, 'subnetworks', 'Instance'), 'Subnetworks'):
        s = _object(s, 'Subnetwork')
        stations = [_int(v, 'Subnetwork station')
                    for v in _array(_get(s, 'stations', 'Subnetwork'),
                                    'Subnetwork stations')]
        origin = s.get('origin')
        if origin is not None:
            origin = _int(origin, 'Subnetwork origin')
        subnetworks.append(Subnetwork.from_network(
            network, _int(_get(s, 'id', 'Subnetwork'), 'Subnetwork id'),
            _enum(SubnetworkKind, _get(s, 'kind', 'Subnetwork'),
                  'Subnetwork kind'),
            stations, origin=origin
        ))

    fleet_doc = _object(_get(doc, 'fleet', 'Instance'), 'Fleet')
    fleet = FleetConfig(
        k=_int(_get(fleet_doc, 'k', 'Fleet'), 'Fleet size'),
        cap=_int(_get(fleet_doc, 'cap', 'Fleet'), 'Capacity'),
        assignment=tuple(_int(a, 'Assignment') for a in
                         _array(fleet_doc.get('assignment', []),
                                'Fleet assignment'))
    )

    requests = []
    for r in _array(doc.get('requests', []), 'Requests'):
        r = _object(r, 'Request')
        fields = {name: _int(r[name], "Request field '{}'".format(name))
                  for name in _REQUEST_FIELDS if r.get(name) is not None}
        requests.append(Request(
            id=_int(_get(r, 'id', 'Request'), 'Request id'),
            kind=_enum(RequestKind, _get(r, 'kind', 'Request'),
                       'Request kind'),
            t=_int(_get(r, 't', 'Request'), 'Release tick'), **fields
        ))

    return Instance(network=network, subnetworks=subnetworks, fleet=fleet,
                    requests=requests,
                    scenario=_enum(Scenario, doc.get('scenario', 'other'),
                                   'Scenario'),
                    objective=_enum(Objective, doc.get('objective', 'length'),
                                    'Objective'),
                    name=str(doc.get('name', '')))


def load_instance(path):
    """
    Read an instance document from ``path``.

    Raises
    ------
    OSError
        When the file cannot be read.

    FormatError
        When the file is not a valid JSON instance document.

    """
    with open(path) as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise FormatError("'{}' is not valid JSON: {}"
                              .format(path, e)) from e
    instance = instance_from_dict(doc)
    if not instance.name:
        instance = instance.replace(name=str(path))
    log.debug("loaded %s: %d requests on %d subnetworks", path,
              len(instance.requests), len(instance.subnetworks))
    return instance


def dump_instance(instance, stream):
    """ Write ``instance`` to an open text stream as JSON. """
    json.dump(instance_to_dict(instance), stream, indent=2)
    stream.write('\n')


def _field(value):
    return '-' if value is None else str(value)


def format_trace(trace):
    """
    Dump the events of a trace, one ``tick event vehicle station payload``
    record per line with ``-`` for empty fields.

    Examples
    --------
    >>> from shuttlesim.engine import Trace, TraceEvent
    >>> trace = Trace(events=[TraceEvent(0, 'released', 0, 1, 5)])
    >>> print(format_trace(trace))
    # tick event vehicle station payload
    0 released 0 1 5

    """
    lines = [TRACE_HEADER]
    for ev in trace.events:
        lines.append(' '.join(_field(v) for v in (ev.tick, ev.kind,
                                                   ev.vehicle, ev.station,
                                                   ev.payload)))
    return '\n'.join(lines)


def parse_trace(text):
    """
    Parse a trace dump produced by :py:func:`format_trace`. Policy queries
    are not part of the dump; the returned trace holds events only.

    Raises
    ------
    FormatError
        On a record that does not have five fields, an unknown event kind
        or a non-integer field.

    """
    events = []
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        parts = line.split()
        if len(parts) != 5:
            raise FormatError("Trace line {:d}: expected 5 fields, got {:d}."
                              .format(n, len(parts)))
        tick, kind, vehicle, station, payload = parts
        if kind not in EVENT_KINDS:
            raise FormatError("Trace line {:d}: unknown event '{:s}'."
                              .format(n, kind))
        try:
            values = [None if v == '-' else int(v)
                      for v in (tick, vehicle, station, payload)]
        except ValueError:
            raise FormatError("Trace line {:d}: fields must be integers or "
                              "'-'.".format(n)) from None
        if values[0] is None:
            raise FormatError("Trace line {:d}: the tick is required."
                              .format(n))
        events.append(TraceEvent(values[0], kind, *values[1:]))
    return Trace(events=events)


def format_schedule(schedule):
    """
    Dump a schedule with one row per move and per action, vehicle by
    vehicle in driving order.

    Move rows read ``vehicle move from to departure arrival load -``;
    action rows read ``vehicle action - station time - delta requests``
    where ``requests`` lists ``id:count`` pairs.

    """
    lines = [SCHEDULE_HEADER]
    for tour in schedule.tours:
        items = []
        for i, move in enumerate(tour.moves):
            items.append(move)
            if i < len(tour.actions):
                items.append(tour.actions[i])
        for item in items:
            if hasattr(item, 'path'):
                row = (item.vehicle, 'move', item.origin, item.destination,
                       item.departure, item.arrival, item.load, '-')
            else:
                served = ','.join('{}:{:+d}'.format(rid, count)
                                  for rid, count in item.served) or '-'
                row = (item.vehicle, 'action', '-', item.station, item.time,
                       '-', '{:+d}'.format(item.delta), served)
            lines.append(' '.join(str(v) for v in row))
    return '\n'.join(lines)
