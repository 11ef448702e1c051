"""
A module containing unit tests for the `bench` module.

Licensed under a 3-clause BSD style license - see LICENSE.txt

"""
import io
import json
from fractions import Fraction

import pytest

from shuttlesim.bench import (theorem_bound, load_suite_config, run_suite,
                              scenario_params, RatioRow, RatioReport,
                              REPORT_COLUMNS, DEFAULT_SEEDS, DEFAULT_LIMITS)
from shuttlesim.core import Objective, Scenario
from shuttlesim.exceptions import ConfigError
from shuttlesim.generators import gen_example, gen_scenario


SMALL_SUITE = """
[suite]
seeds = 3

[sif_m-morning]
policy = sif_m
objective = length
scenario = morning
max_stations = 4
max_requests = 3
max_cap = 2

[sir-morning]
policy = sir
objective = length
scenario = morning
max_stations = 4
max_requests = 3
max_cap = 2

[ex4]
policy = sif_m
objective = makespan
generator = ex4_sifm_makespan
"""


@pytest.fixture
def small_suite(tmp_path):
    path = tmp_path / 'small.cfg'
    path.write_text(SMALL_SUITE)
    return str(path)


def test_theorem_bounds():
    assert theorem_bound('sir', 'length',
                         gen_example('ex1_sir_length')) == 12
    assert theorem_bound('sir', 'length',
                         gen_example('ex1_sir_length', requests=3)) == 3
    assert theorem_bound('sif_m', 'length',
                         gen_example('ex1_sir_length', requests=3)) == 1
    assert theorem_bound('main', 'makespan',
                         gen_example('ex5_main_makespan')) == 2
    assert theorem_bound('main', Objective.TOTAL_TOUR_LENGTH,
                         gen_example('main_length_lb')) == 2
    assert theorem_bound('sir', 'makespan',
                         gen_example('ex2_sir_makespan')) is None
    assert theorem_bound('sif_e', 'length',
                         gen_scenario('morning', 1)) is None
    assert theorem_bound('main', 'length', gen_scenario('lunch', 1)) is None


def test_scenario_params_are_seeded():
    first = scenario_params(5, DEFAULT_LIMITS)
    assert first == scenario_params(5, DEFAULT_LIMITS)
    for seed in range(20):
        p = scenario_params(seed, DEFAULT_LIMITS)
        assert 3 <= p['n'] <= DEFAULT_LIMITS['max_stations']
        assert 1 <= p['requests'] <= DEFAULT_LIMITS['max_requests']
        assert 1 <= p['cap'] <= DEFAULT_LIMITS['max_cap']


def test_bundled_suite():
    config = load_suite_config()
    assert config.seeds == DEFAULT_SEEDS
    assert config.workers == 1
    assert not config.json
    assert len(config.jobs) == 14
    by_name = {job.name: job for job in config.jobs}
    main = by_name['main-morning-makespan']
    assert main.scenario is Scenario.MORNING
    assert main.objective is Objective.MAKESPAN
    assert dict(main.params) == {'layout': 'line'}
    prefix = by_name['ex1-prefix-sif_m-length']
    assert dict(prefix.params) == {'n': 4, 'cap': 3, 'requests': 3}


def test_bundled_theorem_suite():
    report = run_suite()
    assert report.violations == []
    assert report.errors == []
    policies = {row.policy for row in report.rows}
    assert policies == {'sir', 'sif_m', 'sif_e', 'main'}
    assert len(report.rows) >= 6 * DEFAULT_SEEDS


@pytest.mark.parametrize('text', [
    "[a]\nobjective = length\nscenario = morning\n",
    "[a]\npolicy = sir\n",
    "[a]\npolicy = sir\nscenario = morning\ngenerator = ex2_sir_makespan\n",
    "[a]\npolicy = sir\ngenerator = ex9\n",
    "[a]\npolicy = sir\nscenario = rush\n",
    "[a]\npolicy = sir\nscenario = morning\nmax_cap = many\n",
    "[a]\npolicy = sir\nscenario = morning\ncolour = red\n",
    "[suite]\nseeds = 3\n",
    "[suite]\nseeds = lots\n[a]\npolicy = sir\nscenario = morning\n",
    "policy = sir\n",
])
def test_bad_suite_config(tmp_path, text):
    path = tmp_path / 'bad.cfg'
    path.write_text(text)
    with pytest.raises(ConfigError):
        load_suite_config(str(path))


def test_missing_suite_config(tmp_path):
    with pytest.raises(ConfigError):
        load_suite_config(str(tmp_path / 'missing.cfg'))


def test_run_small_suite(small_suite):
    report = run_suite(small_suite)
    assert len(report.rows) == 3 * 2 + 1
    assert report.violations == []
    assert report.errors == []
    assert all(r.satisfied for r in report.rows if r.bound is not None)

    ex4 = [r for r in report.rows if r.generator == 'ex4_sifm_makespan']
    assert len(ex4) == 1
    assert (ex4[0].alg_cost, ex4[0].opt_cost) == (12, 8)
    assert ex4[0].ratio == Fraction(3, 2)
    assert ex4[0].bound is None
    assert ex4[0].satisfied is None

    ids = [(r.instance_id, r.policy, r.objective) for r in report.rows]
    assert ids == sorted(ids)
    assert 'morning-circuit-0000' in {r.instance_id for r in report.rows}


def test_report_files(small_suite):
    report = run_suite(small_suite)

    stream = io.StringIO()
    report.write_csv(stream)
    lines = stream.getvalue().splitlines()
    assert lines[0] == ','.join(REPORT_COLUMNS)
    assert len(lines) == len(report.rows) + 1
    ex4 = next(line for line in lines if line.startswith('ex4_sifm_makespan'))
    assert ex4.endswith(',12,8,3,2,,,')

    stream = io.StringIO()
    report.write_json(stream)
    records = json.loads(stream.getvalue())
    assert len(records) == len(report.rows)
    assert set(records[0]) == set(REPORT_COLUMNS) | {'error'}
    assert all(r['satisfied'] is not False for r in records)


def test_failures_are_reported():
    row = RatioRow(instance_id='x', generator='ex2_sir_makespan', seed=None,
                   policy='main', objective='makespan', bound=Fraction(2),
                   satisfied=False, error='boom')
    report = RatioReport(rows=[row])
    assert report.violations == [row]
    assert report.errors == [row]
    stream = io.StringIO()
    report.write_csv(stream)
    assert stream.getvalue().splitlines()[1] == \
        'x,ex2_sir_makespan,,main,makespan,,,,,2,1,false'


def test_policy_errors_do_not_stop_the_suite(tmp_path):
    path = tmp_path / 'mixed.cfg'
    path.write_text("[main-on-circuit]\npolicy = main\nobjective = length\n"
                    "generator = ex2_sir_makespan\n\n"
                    "[sir]\npolicy = sir\nobjective = makespan\n"
                    "generator = ex2_sir_makespan\n")
    report = run_suite(str(path))
    assert len(report.rows) == 2
    failed, ok = report.rows
    assert failed.policy == 'main'
    assert failed.error is not None
    assert failed.satisfied is None
    assert ok.ratio == Fraction(16, 9)
    assert report.violations == []
