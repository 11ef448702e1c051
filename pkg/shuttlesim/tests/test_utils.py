"""
A module containing unit tests for the `utils` module.

Licensed under a 3-clause BSD style license - see LICENSE.txt

"""
import json

import pytest

from shuttlesim.core import Network, Subnetwork, Request, FleetConfig, \
    Instance
from shuttlesim.engine import run_online, replay
from shuttlesim.exceptions import FormatError, InstanceError
from shuttlesim.generators import gen_example, gen_scenario
from shuttlesim.utils import (instance_to_dict, instance_from_dict,
                              load_instance, dump_instance, format_trace,
                              parse_trace, format_schedule, TRACE_HEADER,
                              SCHEDULE_HEADER)


def linked_instance():
    net = Network(nodes=[1, 2, 3], depot=1,
                  edges=[(1, 2, 1), (2, 3, 2), (3, 1, 1)],
                  labels=[(1, 'parking'), (2, 'building')])
    sub = Subnetwork.from_network(net, 0, 'circuit', [1, 2, 3])
    return Instance(network=net, subnetworks=(sub,),
                    fleet=FleetConfig(k=1, cap=2), requests=[
                        Request(id=1, kind='pickup', t=0, x=2, link=2),
                        Request(id=2, kind='delivery', t=3, y=3, link=1),
                        Request(id=3, kind='full', t=1, x=1, y=2, p=2, q=6,
                                z=2),
                    ], scenario='morning', objective='makespan')


@pytest.mark.parametrize('instance', [
    gen_example('ex1_sir_length'),
    gen_example('ex5_main_makespan'),
    gen_scenario('lunch', 3),
    linked_instance(),
])
def test_instance_document_round_trip(instance):
    doc = instance_to_dict(instance)
    assert instance_from_dict(json.loads(json.dumps(doc))) == instance


def test_instance_document_layout():
    doc = instance_to_dict(linked_instance())
    assert doc['network']['nodes'] == [{'id': 1, 'label': 'parking'},
                                       {'id': 2, 'label': 'building'},
                                       {'id': 3}]
    assert doc['network']['edges'][1] == {'u': 2, 'v': 3, 'len': 2}
    assert doc['subnetworks'] == [{'id': 0, 'kind': 'circuit',
                                   'stations': [1, 2, 3], 'origin': 1}]
    assert doc['fleet'] == {'k': 1, 'cap': 2, 'assignment': [0]}
    assert doc['requests'][0] == {'id': 1, 'kind': 'pickup', 't': 0, 'x': 2,
                                  'z': 1, 'link': 2}
    assert doc['scenario'] == 'morning'
    assert doc['objective'] == 'makespan'
    assert 'name' not in doc


def test_load_and_dump(tmp_path):
    instance = gen_example('ex4_sifm_makespan')
    path = tmp_path / 'ex4.json'
    with open(path, 'w') as f:
        dump_instance(instance, f)
    assert load_instance(str(path)) == instance

    unnamed = tmp_path / 'unnamed.json'
    unnamed.write_text(json.dumps(instance_to_dict(linked_instance())))
    assert load_instance(str(unnamed)).name == str(unnamed)


def test_load_errors(tmp_path):
    bad = tmp_path / 'bad.json'
    bad.write_text('{"network": ')
    with pytest.raises(FormatError):
        load_instance(str(bad))
    with pytest.raises(OSError):
        load_instance(str(tmp_path / 'missing.json'))


@pytest.mark.parametrize('mutate', [
    lambda d: d.pop('network'),
    lambda d: d['network'].pop('depot'),
    lambda d: d['fleet'].pop('cap'),
    lambda d: d['requests'][0].pop('t'),
    lambda d: d['network']['edges'][0].update(len='2'),
    lambda d: d['fleet'].update(k=True),
    lambda d: d['requests'][0].update(x=1.5),
    lambda d: d['requests'].append(5),
    lambda d: d.update(fleet=[1, 2]),
    lambda d: d['fleet'].update(assignment=0),
    lambda d: d['network']['nodes'].append('x'),
    lambda d: d['requests'][0].update(kind='teleport'),
    lambda d: d['subnetworks'][0].update(kind='ring'),
    lambda d: d.update(scenario='rush'),
    lambda d: d.update(objective=3),
])
def test_malformed_documents(mutate):
    doc = instance_to_dict(linked_instance())
    mutate(doc)
    with pytest.raises(FormatError):
        instance_from_dict(doc)


def test_invalid_instance_document():
    doc = instance_to_dict(linked_instance())
    doc['fleet']['cap'] = 1
    with pytest.raises(InstanceError):
        instance_from_dict(doc)
    with pytest.raises(FormatError):
        instance_from_dict([doc])


def test_trace_dump_replays():
    instance = gen_example('ex2_sir_makespan')
    schedule, trace = run_online('sir', instance)
    text = format_trace(trace)
    lines = text.splitlines()
    assert lines[0] == TRACE_HEADER
    assert len(lines) == len(trace.events) + 1
    assert '2 end_of_sequence - - -' in lines

    parsed = parse_trace(text)
    assert parsed.events == trace.events
    assert parsed.queries == []
    assert replay(parsed, instance) == schedule


def test_parse_trace_skips_comments_and_blanks():
    trace = parse_trace("# comment\n\n  3 arrived 0 2 -  \n")
    assert len(trace.events) == 1
    ev = trace.events[0]
    assert (ev.tick, ev.kind, ev.vehicle, ev.station, ev.payload) == \
        (3, 'arrived', 0, 2, None)


@pytest.mark.parametrize('text', [
    "0 released 0 1",
    "0 teleported 0 1 2",
    "0 released zero 1 2",
    "- released 0 1 2",
])
def test_parse_trace_errors(text):
    with pytest.raises(FormatError):
        parse_trace(text)


def test_format_schedule():
    instance = gen_example('ex2_sir_makespan')
    schedule, _ = run_online('sir', instance)
    lines = format_schedule(schedule).splitlines()
    assert lines[0] == SCHEDULE_HEADER
    tour = schedule.tours[0]
    rows = [line.split() for line in lines[1:]]
    assert len(rows) == len(tour.moves) + len(tour.actions)
    assert [r[1] for r in rows[:2]] == ['move', 'action']
    first_action = rows[1]
    assert first_action[3] == '1'
    assert first_action[6] == '+1'
    assert first_action[7] == '1:+1'
